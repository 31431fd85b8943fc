/**
 * Split a revealed sentence into plain and substituted runs so the view
 * can underline the parts the values filled in. The value strings come
 * from the server's pattern detail; nothing is computed here beyond
 * substring search.
 */

export interface Run {
  text: string;
  substituted: boolean;
}

/**
 * Mark every occurrence of any value string. Longer values win when two
 * overlap (so "QBitmap object" beats "object"); ties go to the earlier
 * position.
 */
export function markSubstitutions(sentence: string, values: string[]): Run[] {
  const candidates = values
    .filter((v) => v.length > 0)
    .sort((a, b) => b.length - a.length);
  const taken: [number, number][] = [];
  for (const value of candidates) {
    let from = 0;
    while (true) {
      const at = sentence.indexOf(value, from);
      if (at < 0) break;
      const end = at + value.length;
      if (!taken.some(([s, e]) => at < e && s < end)) {
        taken.push([at, end]);
      }
      from = at + 1;
    }
  }
  taken.sort((a, b) => a[0] - b[0]);

  const runs: Run[] = [];
  let pos = 0;
  for (const [start, end] of taken) {
    if (start > pos) runs.push({ text: sentence.slice(pos, start), substituted: false });
    runs.push({ text: sentence.slice(start, end), substituted: true });
    pos = end;
  }
  if (pos < sentence.length) runs.push({ text: sentence.slice(pos), substituted: false });
  return runs;
}
