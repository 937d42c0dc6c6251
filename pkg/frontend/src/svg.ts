// Minimal string-based SVG builder. No DOM in a headless renderer, so
// elements are assembled as text with attribute maps, mirroring the
// usual createElementNS helper shape.

export type Attrs = Record<string, string | number>;

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function attrText(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([key, value]) => ` ${key}="${escapeXml(String(value))}"`)
    .join("");
}

/** Self-closing element, or a container when children are given. */
export function el(tag: string, attrs: Attrs, children?: string[]): string {
  if (children === undefined || children.length === 0) {
    return `<${tag}${attrText(attrs)}/>`;
  }
  return `<${tag}${attrText(attrs)}>${children.join("")}</${tag}>`;
}

/** Text node element with escaped content. */
export function textEl(attrs: Attrs, content: string): string {
  return `<text${attrText(attrs)}>${escapeXml(content)}</text>`;
}

export function svgDocument(
  width: number,
  height: number,
  children: string[],
): string {
  const open =
    `<svg xmlns="http://www.w3.org/2000/svg" ` +
    `width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">`;
  return `${open}${children.join("")}</svg>\n`;
}
