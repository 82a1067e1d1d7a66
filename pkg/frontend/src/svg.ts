/** Render a layout as an SVG string. Highlighted (filled) nodes get the
 * match color so a rule's matched subgraph stands out. */

import type { Layout } from './layout.js';

export const escapeXml = (s: string): string =>
  s
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');

export const renderSvg = (layout: Layout): string => {
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${layout.width} ${layout.height}" ` +
      `width="${layout.width}" height="${layout.height}" class="graph">`,
  );
  parts.push(
    '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ' +
      'markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
      '<path d="M 0 0 L 10 5 L 0 10 z" fill="#555"/></marker></defs>',
  );
  for (const e of layout.edges) {
    parts.push(
      `<path d="${e.path}" fill="none" stroke="#555" stroke-width="1.4" marker-end="url(#arrow)"/>`,
    );
    if (e.label) {
      parts.push(
        `<text x="${e.lx}" y="${e.ly}" class="edge-label" font-size="12" fill="#444">` +
          `${escapeXml(e.label)}</text>`,
      );
    }
  }
  for (const n of layout.nodes) {
    const fill = n.filled ? '#ffd75e' : '#ffffff';
    parts.push(
      `<g class="node${n.filled ? ' matched' : ''}" data-node="${escapeXml(n.id)}">` +
        `<rect x="${n.x - n.w / 2}" y="${n.y - n.h / 2}" width="${n.w}" height="${n.h}" ` +
        `rx="16" fill="${fill}" stroke="#333" stroke-width="1.3"/>` +
        `<text x="${n.x}" y="${n.y + 4}" text-anchor="middle" font-size="13">` +
        `${escapeXml(n.label)}</text></g>`,
    );
  }
  parts.push('</svg>');
  return parts.join('');
};
