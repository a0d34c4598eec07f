/** Small HTML-string rendering helpers shared by the stage consoles. */

export function escapeHtml(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

/** The stale-state banner shown after a 409; empty string when not stale. */
export function renderStaleBanner(banner: { code: string; message: string } | null): string {
  if (banner === null) return "";
  return (
    `<div class="banner banner-stale" role="alert" data-code="${escapeHtml(banner.code)}">` +
    `<strong>Out of date.</strong> ${escapeHtml(banner.message)} ` +
    `<button data-action="refresh">Refresh</button></div>`
  );
}

export function disabledAttr(disabled: boolean): string {
  return disabled ? " disabled" : "";
}
