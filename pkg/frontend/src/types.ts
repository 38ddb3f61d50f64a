/** Fixed 10-item taxonomy of manual correction categories. */
export const CORRECTION_CATEGORIES = [
  "descriptor/information mixup",
  "incorrect lymph node information",
  "copy-forward OCR error",
  "made up information not otherwise in report",
  "inclusion of gross description",
  "misunderstood medical phrase",
  "incorrect tumor staging",
  "inclusion of patient age",
  "grammar clarification",
  "manual correction error",
] as const;

export type CorrectionCategory = (typeof CORRECTION_CATEGORIES)[number];

export interface ReviewCase {
  case_id: string;
  fold: number;
  original: string;
  summary: string;
  corrected?: string;
  categories: CorrectionCategory[];
  reviewed: boolean;
}

export interface CharRange {
  start: number;
  end: number; // exclusive
}

export interface HighlightMatch {
  source_range: CharRange;
  target_ranges: CharRange[];
  /** Match quality in [0,1]; 1 for exact substring matches. */
  score: number;
}

export function isValidCategory(value: string): value is CorrectionCategory {
  return (CORRECTION_CATEGORIES as readonly string[]).includes(value);
}

/** Invariant check: corrected present implies reviewed; categories in taxonomy. */
export function validateCase(c: ReviewCase): string[] {
  const problems: string[] = [];
  if (c.corrected !== undefined && !c.reviewed) {
    problems.push("corrected present but reviewed is false");
  }
  for (const cat of c.categories) {
    if (!isValidCategory(cat)) {
      problems.push(`unknown category: ${cat}`);
    }
  }
  return problems;
}
