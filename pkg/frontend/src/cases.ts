import { ReviewCase, isValidCategory, validateCase } from "./types";

export interface LoadError {
  line: number; // 1-based line number in the input file
  message: string;
}

/** A loaded case plus the exact bytes of its source line, so unedited cases
 * round-trip byte-identically through export. */
export interface LoadedCase {
  case: ReviewCase;
  raw: string;
  dirty: boolean;
}

export interface ReviewFile {
  cases: LoadedCase[];
  errors: LoadError[];
  /** True when the input ended with a newline; export reproduces it. */
  trailingNewline: boolean;
}

function parseLine(raw: string, lineNo: number): ReviewCase {
  let obj: unknown;
  try {
    obj = JSON.parse(raw);
  } catch (e) {
    throw new Error(`line ${lineNo}: not valid JSON`);
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new Error(`line ${lineNo}: not a JSON object`);
  }
  const rec = obj as Record<string, unknown>;
  if (typeof rec.case_id !== "string" || rec.case_id === "") {
    throw new Error(`line ${lineNo}: missing case_id`);
  }
  if (typeof rec.original !== "string" || typeof rec.summary !== "string") {
    throw new Error(`line ${lineNo}: missing original/summary text`);
  }
  const fold = typeof rec.fold === "number" ? rec.fold : 0;
  const corrected = typeof rec.corrected === "string" ? rec.corrected : undefined;
  const categories: string[] = Array.isArray(rec.categories)
    ? rec.categories.filter((c): c is string => typeof c === "string")
    : [];
  for (const cat of categories) {
    if (!isValidCategory(cat)) {
      throw new Error(`line ${lineNo}: unknown category "${cat}"`);
    }
  }
  const reviewed =
    typeof rec.reviewed === "boolean" ? rec.reviewed : corrected !== undefined;
  const parsed: ReviewCase = {
    case_id: rec.case_id,
    fold,
    original: rec.original,
    summary: rec.summary,
    corrected,
    categories: categories as ReviewCase["categories"],
    reviewed,
  };
  const problems = validateCase(parsed);
  if (problems.length > 0) {
    throw new Error(`line ${lineNo}: ${problems.join("; ")}`);
  }
  return parsed;
}

/** Parse a JSONL review file. Malformed lines are flagged as errors and the
 * remaining lines still load; duplicate case_ids flag the duplicate line. */
export function loadCases(text: string): ReviewFile {
  const trailingNewline = text.endsWith("\n");
  const body = trailingNewline ? text.slice(0, -1) : text;
  const cases: LoadedCase[] = [];
  const errors: LoadError[] = [];
  const seen = new Set<string>();
  if (body === "") {
    return { cases, errors, trailingNewline };
  }
  body.split("\n").forEach((raw, i) => {
    const lineNo = i + 1;
    try {
      const parsed = parseLine(raw, lineNo);
      if (seen.has(parsed.case_id)) {
        throw new Error(`line ${lineNo}: duplicate case_id "${parsed.case_id}"`);
      }
      seen.add(parsed.case_id);
      cases.push({ case: parsed, raw, dirty: false });
    } catch (e) {
      errors.push({ line: lineNo, message: (e as Error).message });
    }
  });
  return { cases, errors, trailingNewline };
}

function serializeCase(c: ReviewCase): string {
  const out: Record<string, unknown> = {
    case_id: c.case_id,
    fold: c.fold,
    original: c.original,
    summary: c.summary,
  };
  if (c.corrected !== undefined) {
    out.corrected = c.corrected;
  }
  if (c.categories.length > 0) {
    out.categories = c.categories;
  }
  out.reviewed = c.reviewed;
  return JSON.stringify(out);
}

/** Apply a correction to a case, marking it reviewed and dirty. */
export function applyCorrection(
  loaded: LoadedCase,
  corrected: string,
  categories: ReviewCase["categories"],
): void {
  loaded.case = { ...loaded.case, corrected, categories, reviewed: true };
  loaded.dirty = true;
}

/** Mark a case reviewed without a text edit. */
export function markReviewed(loaded: LoadedCase): void {
  if (!loaded.case.reviewed) {
    loaded.case = { ...loaded.case, reviewed: true };
    loaded.dirty = true;
  }
}

/** Serialize the review file. Untouched cases are emitted as their original
 * bytes, so a load-then-export with no edits is byte-identical. */
export function exportCorrections(file: ReviewFile): string {
  const lines = file.cases.map((lc) => (lc.dirty ? serializeCase(lc.case) : lc.raw));
  const body = lines.join("\n");
  return file.trailingNewline ? body + "\n" : body;
}
