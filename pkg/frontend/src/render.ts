/** HTML renderers for the five workbench panels. Pure string builders so
 * they are testable without a DOM; main.ts mounts the result and routes
 * events via data-action attributes. */

import type { MetricRecord } from './types.js';
import { exampleIds, pageCount, type WorkbenchState } from './state.js';

export const escapeHtml = (s: string): string =>
  s
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');

/** Reproduce the server's JSON text for a metric value: integers as-is,
 * integral floats with a trailing .0, everything else shortest-form. The
 * table must show the payload's numbers, not reformatted ones. */
export const fmtMetricValue = (value: number, isFloat: boolean): string =>
  isFloat && Number.isInteger(value) ? value.toFixed(1) : String(value);

const metricCells = (r: MetricRecord): string => {
  const ints = [r.tp, r.fp, r.fn, r.tn].map((v) => `<td>${fmtMetricValue(v, false)}</td>`);
  const floats = [r.precision, r.recall, r.f1].map(
    (v) => `<td>${fmtMetricValue(v, true)}</td>`,
  );
  return ints.join('') + floats.join('');
};

const banner = (state: WorkbenchState): string => {
  if (!state.connected) {
    return (
      '<div class="banner error">server unreachable ' +
      '<button data-action="retry">retry</button></div>'
    );
  }
  return state.banner ? `<div class="banner error">${escapeHtml(state.banner)}</div>` : '';
};

const classPicker = (state: WorkbenchState): string => {
  const options = state.classes
    .map(
      (c) =>
        `<option value="${escapeHtml(c)}"${c === state.selectedClass ? ' selected' : ''}>` +
        `${escapeHtml(c)}</option>`,
    )
    .join('');
  return (
    '<label>class <select data-action="select-class">' +
    `<option value=""${state.selectedClass ? '' : ' selected'}>—</option>${options}` +
    '</select></label>'
  );
};

export const renderBrowser = (state: WorkbenchState): string => {
  const page = state.rowsPage;
  let body = '';
  if (!page || page.rows.length === 0) {
    body = '<p class="notice">no rows</p>';
  } else {
    const rows = page.rows
      .map(
        (r) =>
          `<tr data-action="select-row" data-row="${r.id}"` +
          `${state.selectedRow?.id === r.id ? ' class="selected"' : ''}>` +
          `<td>${r.id}</td><td>${escapeHtml(r.text)}</td>` +
          `<td>${escapeHtml(r.labels.join(', '))}</td><td>${escapeHtml(r.split)}</td></tr>`,
      )
      .join('');
    body =
      '<table class="rows"><thead><tr><th>id</th><th>text</th><th>labels</th><th>split</th>' +
      `</tr></thead><tbody>${rows}</tbody></table>`;
  }
  const totalPages = page ? pageCount(page.total, page.page_size) : 0;
  const splits = ['train', 'val', 'unlabeled', '']
    .map(
      (s) =>
        `<option value="${s}"${s === state.split ? ' selected' : ''}>${s || 'all'}</option>`,
    )
    .join('');
  return (
    '<section class="panel" id="browser"><h2>① dataset</h2>' +
    `<div class="controls"><label>split <select data-action="select-split">${splits}</select></label>` +
    `<button data-action="prev-page"${state.page <= 1 ? ' disabled' : ''}>prev</button>` +
    `<span>page ${state.page} of ${totalPages}</span>` +
    `<button data-action="next-page"${state.page >= totalPages ? ' disabled' : ''}>next</button></div>` +
    body +
    renderGraphPanel(state) +
    '</section>'
  );
};

const renderGraphPanel = (state: WorkbenchState): string => {
  const row = state.selectedRow;
  if (!row) return '<div id="graph-panel"></div>';
  const graph = state.selectedRowSvg
    ? state.selectedRowSvg
    : '<p class="notice">graph rendering failed; PENMAN shown below</p>';
  return (
    `<div id="graph-panel"><h3>row ${row.id}</h3>` +
    `<p class="row-text">${escapeHtml(row.text)}</p>` +
    graph +
    `<pre class="penman" id="penman-text">${escapeHtml(row.penman)}</pre>` +
    `<button data-action="copy-penman" data-penman="${escapeHtml(row.penman)}">copy PENMAN</button>` +
    '</div>'
  );
};

export const renderRuleEditor = (state: WorkbenchState): string => {
  if (state.mode === 'inference') return ''; // editing hidden entirely
  if (!state.selectedClass) {
    return '<section class="panel" id="editor"><h2>③ rules</h2><p class="notice">select a class</p></section>';
  }
  const cards = state.drafts
    .map((draft, ri) => {
      const clauses = draft.clauses
        .map((clause, ci) => {
          const err = state.clauseErrors[`${ri}:${ci}`];
          return (
            `<div class="clause"><textarea data-action="edit-clause" data-rule="${ri}" ` +
            `data-clause="${ci}" rows="2">${escapeHtml(clause.penman)}</textarea>` +
            `<label><input type="checkbox" data-action="toggle-negated" data-rule="${ri}" ` +
            `data-clause="${ci}"${clause.negated ? ' checked' : ''}> negated</label>` +
            `<button data-action="refine-preview" data-rule="${ri}" data-clause="${ci}">refine</button>` +
            `<button data-action="remove-clause" data-rule="${ri}" data-clause="${ci}">✕</button>` +
            (err ? `<p class="clause-error">${escapeHtml(err)}</p>` : '') +
            '</div>'
          );
        })
        .join('');
      return (
        `<div class="rule-card" data-rule-card="${ri}"><h4>rule ${ri}` +
        `${draft.dirty ? ' <span class="dirty" title="unsaved changes">*</span>' : ''}</h4>` +
        clauses +
        `<button data-action="add-clause" data-rule="${ri}">+ clause</button>` +
        `<button data-action="save-rule" data-rule="${ri}"${draft.dirty ? '' : ' disabled'}>save</button>` +
        `<button data-action="delete-rule" data-rule="${ri}">delete</button></div>`
      );
    })
    .join('');
  return (
    '<section class="panel" id="editor"><h2>③ rules</h2>' +
    cards +
    '<button data-action="add-rule">+ rule</button>' +
    renderSuggestions(state) +
    renderRefinePreview(state) +
    '</section>'
  );
};

const renderSuggestions = (state: WorkbenchState): string => {
  const list = state.suggestions;
  const items = list
    ? list
        .map(
          (s, i) =>
            `<li><code>${escapeHtml(s.penman)}</code> ` +
            `p=${fmtMetricValue(s.precision, true)} r=${fmtMetricValue(s.recall, true)} ` +
            `(tp=${s.tp} fp=${s.fp}) ` +
            `<button data-action="accept-suggestion" data-suggestion="${i}">accept</button></li>`,
        )
        .join('')
    : '';
  return (
    '<div id="suggestions"><button data-action="suggest">suggest rules</button>' +
    (list ? `<ol class="suggestions">${items || '<li>none</li>'}</ol>` : '') +
    '</div>'
  );
};

const renderRefinePreview = (state: WorkbenchState): string => {
  const preview = state.refinePreview;
  if (!preview) return '';
  const stats = (list: typeof preview.accepted) =>
    list
      .map(
        (s) =>
          `<li data-refine-label="${escapeHtml(s.label)}"><code>${escapeHtml(s.label)}</code> ` +
          `tp=${s.tp} fp=${s.fp} p=${fmtMetricValue(s.precision, true)}</li>`,
      )
      .join('');
  return (
    '<div id="refine-preview"><h4>refine preview</h4>' +
    `<p>rule ${preview.rule_index}, clause ${preview.clause_index} → ` +
    `<code>${escapeHtml(preview.penman)}</code></p>` +
    `<p>accepted</p><ul class="accepted">${stats(preview.accepted)}</ul>` +
    `<p>rejected</p><ul class="rejected">${stats(preview.rejected)}</ul>` +
    '<button data-action="refine-apply">apply</button>' +
    '<button data-action="refine-cancel">cancel</button></div>'
  );
};

export const renderMetricsTable = (state: WorkbenchState): string => {
  if (state.mode === 'inference') return '';
  const header =
    '<section class="panel" id="evaluation"><h2>④ evaluation</h2>' +
    (state.evaluationStale
      ? '<p class="notice stale">rules changed since last evaluation</p>'
      : '');
  if (!state.evaluation) {
    return header + '<p class="notice">no evaluation yet</p></section>';
  }
  const report = state.evaluation.report;
  const rows = report.rules
    .map(
      (r) =>
        `<tr data-action="select-example-rule" data-rule="${r.index}">` +
        `<td>rule ${r.index}</td>${metricCells(r)}</tr>`,
    )
    .join('');
  return (
    header +
    `<p>class <b>${escapeHtml(report.class)}</b>, split <b>${escapeHtml(report.split)}</b></p>` +
    '<table class="metrics"><thead><tr><th></th><th>tp</th><th>fp</th><th>fn</th><th>tn</th>' +
    '<th>precision</th><th>recall</th><th>f1</th></tr></thead><tbody>' +
    rows +
    `<tr class="total" data-action="select-example-rule" data-rule="total"><td>total</td>` +
    `${metricCells(report.total)}</tr>` +
    '</tbody></table></section>'
  );
};

export const renderExamplePane = (state: WorkbenchState): string => {
  if (state.mode === 'inference') return '';
  if (!state.evaluation) {
    return '<section class="panel" id="examples"><h2>⑤ examples</h2><p class="notice">evaluate first</p></section>';
  }
  const ids = exampleIds(state);
  const tabs = (['tp', 'fp', 'fn'] as const)
    .map(
      (kind) =>
        `<button data-action="select-example-kind" data-kind="${kind}"` +
        `${state.exampleKind === kind ? ' class="active"' : ''}>${kind}</button>`,
    )
    .join('');
  const items = ids
    .map(
      (id) =>
        `<li><button data-action="inspect-example" data-row="${id}">row ${id}</button></li>`,
    )
    .join('');
  const which = state.exampleRule === 'total' ? 'total' : `rule ${state.exampleRule}`;
  return (
    '<section class="panel" id="examples"><h2>⑤ examples</h2>' +
    `<div class="controls">${tabs}<span>${which} · ${state.exampleKind} · ` +
    `<span id="example-count">${ids.length}</span> rows</span></div>` +
    `<ul class="examples">${items || '<li class="notice">empty</li>'}</ul>` +
    '</section>'
  );
};

const renderProposals = (state: WorkbenchState): string => {
  if (state.mode !== 'advanced') return '';
  const list = state.proposals;
  const items = list
    ? list
        .map(
          (p) =>
            `<li>row ${p.row_id} → ${escapeHtml(p.labels.join(', '))} ` +
            `<small>${p.provenance
              .map((pr) => `${escapeHtml(pr.class)}#${pr.rule_index}`)
              .join(', ')}</small> ` +
            `<button data-action="accept-proposal" data-row="${p.row_id}">accept</button></li>`,
        )
        .join('')
    : '';
  return (
    '<section class="panel" id="proposals"><h2>proposals</h2>' +
    '<button data-action="load-proposals">propose labels</button>' +
    (list ? `<ul>${items || '<li class="notice">none</li>'}</ul>` : '') +
    '</section>'
  );
};

const renderInference = (state: WorkbenchState): string => {
  if (state.mode !== 'inference') return '';
  const rules = Object.entries(state.rules.classes)
    .map(
      ([label, list]) =>
        `<li><b>${escapeHtml(label)}</b><ul>${list
          .map(
            (r) =>
              `<li>${r.clauses
                .map(
                  (c) =>
                    `${c.negated ? 'NOT ' : ''}<code>${escapeHtml(c.penman)}</code>`,
                )
                .join(' AND ')}</li>`,
          )
          .join('')}</ul></li>`,
    )
    .join('');
  return (
    '<section class="panel" id="inference"><h2>rules (read-only)</h2>' +
    `<ul>${rules || '<li class="notice">no rules</li>'}</ul>` +
    '<h2>predict</h2>' +
    '<textarea id="predict-input" rows="3" placeholder="(u_1 / label :role (u_2 / label))"></textarea>' +
    '<button data-action="predict">predict</button>' +
    '<pre id="predict-output"></pre></section>'
  );
};

export const renderApp = (state: WorkbenchState): string => {
  const head =
    `<header><h1>rule workbench</h1>` +
    `<span class="mode-badge">${escapeHtml(state.mode ?? '…')}</span>` +
    (state.mode === 'inference' ? '' : classPicker(state)) +
    (state.busy ? '<span class="busy">working…</span>' : '') +
    '</header>';
  if (state.mode === 'inference') {
    return banner(state) + head + '<main class="single">' + renderInference(state) + '</main>';
  }
  return (
    banner(state) +
    head +
    '<main class="grid">' +
    renderBrowser(state) +
    renderRuleEditor(state) +
    renderMetricsTable(state) +
    renderExamplePane(state) +
    renderProposals(state) +
    '</main>'
  );
};
