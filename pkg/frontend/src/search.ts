/** Client-side resource lookup over the uploaded file, so the service
 * surface stays minimal: the RES picker autocompletes from here. */

export interface ResourceEntry {
  subject: string;
  value: string;
}

const TRIPLE = /^<([^>]*)>\s+<[^>]*>\s+"((?:[^"\\]|\\.)*)"/;

export function indexResources(text: string, format: "ntriples" | "csv"): ResourceEntry[] {
  const entries: ResourceEntry[] = [];
  const lines = text.split(/\r?\n/);
  if (format === "ntriples") {
    for (const line of lines) {
      const match = TRIPLE.exec(line.trim());
      if (match) entries.push({ subject: match[1], value: match[2] });
    }
    return entries;
  }
  for (const line of lines.slice(1)) {
    if (!line.trim()) continue;
    const comma = line.indexOf(",");
    if (comma <= 0) continue;
    // canonical CSV: first column subject, second the value
    entries.push({ subject: unquote(line.slice(0, comma)), value: unquote(line.slice(comma + 1)) });
  }
  return entries;
}

function unquote(cell: string): string {
  const trimmed = cell.trim();
  if (trimmed.startsWith('"') && trimmed.endsWith('"')) {
    return trimmed.slice(1, -1).replace(/""/g, '"');
  }
  return trimmed;
}

export function searchResources(
  entries: ResourceEntry[],
  query: string,
  limit = 8,
): ResourceEntry[] {
  const needle = query.trim().toLowerCase();
  if (!needle) return [];
  const hits: ResourceEntry[] = [];
  for (const entry of entries) {
    if (entry.subject.toLowerCase().includes(needle)) {
      hits.push(entry);
      if (hits.length >= limit) break;
    }
  }
  return hits;
}
