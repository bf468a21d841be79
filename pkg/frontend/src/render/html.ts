/** Tiny HTML helpers shared by the renderers. */

export function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/**
 * Percentage label for a wire probability, 0 decimal places.
 * The only arithmetic is display formatting; probabilities are never
 * recomputed or renormalized client-side.
 */
export function pct(prob: number): string {
  return `${Math.round(prob * 100)}%`;
}

export function errorBadge(message: string | undefined): string {
  return message ? `<span class="inline-error" role="alert">${esc(message)}</span>` : "";
}
