import { CharRange, HighlightMatch } from "./types";

/** Number words are normalized to digits so paraphrases like
 * "three lymph nodes" still match "lymph nodes (3)". */
const NUMBER_WORDS: Record<string, string> = {
  zero: "0", one: "1", two: "2", three: "3", four: "4", five: "5",
  six: "6", seven: "7", eight: "8", nine: "9", ten: "10",
  eleven: "11", twelve: "12", thirteen: "13", fourteen: "14", fifteen: "15",
  sixteen: "16", seventeen: "17", eighteen: "18", nineteen: "19", twenty: "20",
};

interface Token {
  norm: string;
  start: number;
  end: number;
}

export function tokenize(text: string): Token[] {
  const tokens: Token[] = [];
  const re = /[A-Za-z0-9]+/g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(text)) !== null) {
    const lower = m[0].toLowerCase();
    tokens.push({
      norm: NUMBER_WORDS[lower] ?? lower,
      start: m.index,
      end: m.index + m[0].length,
    });
  }
  return tokens;
}

/** Order-normalized token n-grams of length 1..k (a shingle set). */
export function shingles(tokens: string[], k: number): Set<string> {
  const out = new Set<string>();
  for (let len = 1; len <= k; len++) {
    for (let i = 0; i + len <= tokens.length; i++) {
      out.add(tokens.slice(i, i + len).sort().join("|"));
    }
  }
  return out;
}

export function jaccard(a: Set<string>, b: Set<string>): number {
  if (a.size === 0 && b.size === 0) return 0;
  let inter = 0;
  for (const item of a) {
    if (b.has(item)) inter++;
  }
  return inter / (a.size + b.size - inter);
}

function exactMatches(selection: string, doc: string): CharRange[] {
  const needle = selection.toLowerCase();
  const haystack = doc.toLowerCase();
  const ranges: CharRange[] = [];
  let from = 0;
  while (true) {
    const at = haystack.indexOf(needle, from);
    if (at < 0) break;
    ranges.push({ start: at, end: at + needle.length });
    from = at + needle.length; // non-overlapping
  }
  return ranges;
}

export const FUZZY_THRESHOLD = 0.5;

function fuzzyMatches(selection: string, doc: string): { ranges: CharRange[]; score: number } {
  const selTokens = tokenize(selection).map((t) => t.norm);
  const docTokens = tokenize(doc);
  if (selTokens.length === 0 || docTokens.length === 0) {
    return { ranges: [], score: 0 };
  }
  const k = Math.min(3, selTokens.length);
  const selShingles = shingles(selTokens, k);
  const width = Math.min(selTokens.length, docTokens.length);

  const windows: { range: CharRange; score: number }[] = [];
  for (let i = 0; i + width <= docTokens.length; i++) {
    const winTokens = docTokens.slice(i, i + width);
    const score = jaccard(selShingles, shingles(winTokens.map((t) => t.norm), k));
    if (score >= FUZZY_THRESHOLD) {
      windows.push({
        range: { start: winTokens[0].start, end: winTokens[width - 1].end },
        score,
      });
    }
  }
  // Greedily keep the best-scoring non-overlapping windows.
  windows.sort((a, b) => b.score - a.score || a.range.start - b.range.start);
  const chosen: { range: CharRange; score: number }[] = [];
  for (const w of windows) {
    if (!chosen.some((c) => w.range.start < c.range.end && c.range.start < w.range.end)) {
      chosen.push(w);
    }
  }
  chosen.sort((a, b) => a.range.start - b.range.start);
  return {
    ranges: chosen.map((c) => c.range),
    score: chosen.length > 0 ? Math.max(...chosen.map((c) => c.score)) : 0,
  };
}

/** Find where a selection from one pane appears in the other document.
 * Exact case-insensitive substring matches win (score 1); otherwise
 * token-shingle fuzzy matches with Jaccard >= 0.5. Empty target_ranges
 * mean nothing cleared the threshold. */
export function crossHighlight(
  selection: string,
  sourceRange: CharRange,
  otherDocument: string,
): HighlightMatch {
  if (selection.length === 0) {
    throw new Error("empty selection");
  }
  const exact = exactMatches(selection, otherDocument);
  if (exact.length > 0) {
    return { source_range: sourceRange, target_ranges: exact, score: 1 };
  }
  const fuzzy = fuzzyMatches(selection, otherDocument);
  return { source_range: sourceRange, target_ranges: fuzzy.ranges, score: fuzzy.score };
}
