import { applyCorrection, exportCorrections, loadCases, markReviewed, ReviewFile } from "./cases";
import { crossHighlight } from "./highlight";
import { CharRange, CORRECTION_CATEGORIES, CorrectionCategory } from "./types";

let file: ReviewFile | null = null;
let current = -1;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function escapeHtml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function renderPane(pane: HTMLElement, text: string, ranges: CharRange[]): void {
  let html = "";
  let pos = 0;
  for (const r of ranges) {
    html += escapeHtml(text.slice(pos, r.start));
    html += `<mark>${escapeHtml(text.slice(r.start, r.end))}</mark>`;
    pos = r.end;
  }
  html += escapeHtml(text.slice(pos));
  pane.innerHTML = html;
}

/** Character offsets of the current selection within a pane's text content. */
function selectionIn(pane: HTMLElement): { text: string; range: CharRange } | null {
  const sel = window.getSelection();
  if (!sel || sel.rangeCount === 0 || sel.isCollapsed) return null;
  const range = sel.getRangeAt(0);
  if (!pane.contains(range.commonAncestorContainer)) return null;
  const pre = range.cloneRange();
  pre.selectNodeContents(pane);
  pre.setEnd(range.startContainer, range.startOffset);
  const start = pre.toString().length;
  const text = range.toString();
  if (text.trim() === "") return null;
  return { text, range: { start, end: start + text.length } };
}

function summaryText(): string {
  const lc = file!.cases[current];
  return lc.case.corrected ?? lc.case.summary;
}

function renderCaseList(): void {
  const list = $("case-list");
  list.innerHTML = "";
  file!.cases.forEach((lc, i) => {
    const li = document.createElement("li");
    li.textContent = `${lc.case.case_id}${lc.case.reviewed ? " ✓" : ""}`;
    li.className = i === current ? "selected" : "";
    li.onclick = () => selectCase(i);
    list.appendChild(li);
  });
  const errs = file!.errors;
  $("load-errors").textContent = errs.length
    ? errs.map((e) => `line ${e.line}: ${e.message}`).join("\n")
    : "";
}

function selectCase(i: number): void {
  current = i;
  const lc = file!.cases[i];
  renderPane($("original-pane"), lc.case.original, []);
  renderPane($("summary-pane"), summaryText(), []);
  ($("editor") as HTMLTextAreaElement).value = summaryText();
  const boxes = document.querySelectorAll<HTMLInputElement>("#categories input");
  boxes.forEach((b) => {
    b.checked = lc.case.categories.includes(b.value as CorrectionCategory);
  });
  renderCaseList();
}

function highlightFrom(sourceId: string, targetId: string, targetText: string): void {
  const found = selectionIn($(sourceId));
  if (!found) return;
  const match = crossHighlight(found.text, found.range, targetText);
  renderPane($(targetId), targetText, match.target_ranges);
  $("match-info").textContent = match.target_ranges.length
    ? `${match.target_ranges.length} match(es), score ${match.score.toFixed(2)}`
    : "no match ≥ 0.5";
}

function init(): void {
  const cats = $("categories");
  for (const cat of CORRECTION_CATEGORIES) {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.value = cat;
    label.appendChild(box);
    label.appendChild(document.createTextNode(cat));
    cats.appendChild(label);
  }

  ($("file-input") as HTMLInputElement).onchange = async (ev) => {
    const input = ev.target as HTMLInputElement;
    if (!input.files || input.files.length === 0) return;
    file = loadCases(await input.files[0].text());
    current = -1;
    renderCaseList();
    if (file.cases.length > 0) selectCase(0);
  };

  $("original-pane").onmouseup = () => {
    if (file && current >= 0) highlightFrom("original-pane", "summary-pane", summaryText());
  };
  $("summary-pane").onmouseup = () => {
    if (file && current >= 0)
      highlightFrom("summary-pane", "original-pane", file.cases[current].case.original);
  };

  $("save-correction").onclick = () => {
    if (!file || current < 0) return;
    const text = ($("editor") as HTMLTextAreaElement).value;
    const chosen = Array.from(
      document.querySelectorAll<HTMLInputElement>("#categories input:checked"),
    ).map((b) => b.value as CorrectionCategory);
    applyCorrection(file.cases[current], text, chosen);
    selectCase(current);
  };

  $("mark-reviewed").onclick = () => {
    if (!file || current < 0) return;
    markReviewed(file.cases[current]);
    selectCase(current);
  };

  $("export").onclick = () => {
    if (!file) return;
    const blob = new Blob([exportCorrections(file)], { type: "application/jsonl" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "corrections.jsonl";
    a.click();
    URL.revokeObjectURL(a.href);
  };
}

document.addEventListener("DOMContentLoaded", init);
