/**
 * Direction handling for Arabic strings inside a left-to-right page.
 *
 * Every potentially-Arabic string is rendered inside an element carrying
 * an explicit dir attribute, so the browser isolates its bidi run and
 * neighbouring LTR punctuation cannot reorder around it.
 */

const RTL_RANGES: Array<[number, number]> = [
  [0x0590, 0x05ff], // Hebrew
  [0x0600, 0x06ff], // Arabic
  [0x0750, 0x077f],
  [0x08a0, 0x08ff],
  [0xfb50, 0xfdff],
  [0xfe70, 0xfeff],
];

export function isRtlChar(ch: string): boolean {
  const cp = ch.codePointAt(0) ?? 0;
  return RTL_RANGES.some(([lo, hi]) => cp >= lo && cp <= hi);
}

/** Direction from the first strong directional character. */
export function textDirection(text: string): "rtl" | "ltr" {
  for (const ch of text) {
    if (isRtlChar(ch)) return "rtl";
    if (/[A-Za-z]/.test(ch)) return "ltr";
  }
  return "ltr";
}

export function dirAttr(text: string): string {
  return `dir="${textDirection(text)}"`;
}
