/** Full workflow against a live service: browse renders DOT into SVG, the
 * top suggestion becomes a rule, the metrics table shows the evaluation
 * payload byte-for-byte, the example pane mirrors the metric row, refine
 * preview lists the server's accepted labels, and inference mode is
 * read-only. Skipped nowhere — the service is a hard dependency. */

import { afterAll, beforeAll, describe, expect, it } from 'vitest';
import { type ChildProcess, spawn } from 'node:child_process';
import { mkdirSync, mkdtempSync, rmSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { ApiClient, ApiError } from '../src/api.js';
import { Controller } from '../src/app.js';
import { renderApp } from '../src/render.js';
import { exampleIds } from '../src/state.js';

const PORT = 8931;
const INFER_PORT = 8932;
const BASE = `http://127.0.0.1:${PORT}`;
const INFER_BASE = `http://127.0.0.1:${INFER_PORT}`;

const PLANTED = ['dump', 'pour', 'insert', 'pack', 'release'];

const corpusLines = (): string[] => {
  const lines: string[] = [];
  for (let i = 0; i < 20; i++) {
    const verb = PLANTED[i % PLANTED.length];
    lines.push(
      JSON.stringify({
        text: `${verb} the sand into the box ${i}`,
        penman: `(a / ${verb} :2 (b / entity2))`,
        labels: ['ed'],
        split: 'train',
      }),
    );
  }
  // one poison row: matches the entity2 feature but is not labeled
  lines.push(
    JSON.stringify({
      text: 'spoil the sand near the box',
      penman: '(a / spoil :2 (b / entity2))',
      labels: [],
      split: 'train',
    }),
  );
  for (let i = 0; i < 20; i++) {
    lines.push(
      JSON.stringify({
        text: `look at thing ${i}`,
        penman: `(a / see${i} :1 (b / thing${i}))`,
        labels: [],
        split: 'train',
      }),
    );
  }
  return lines;
};

let workDir: string;
let serverA: ChildProcess | null = null;
let serverB: ChildProcess | null = null;
let stderrA = '';
let stderrB = '';

const startService = (args: string[], onStderr: (chunk: string) => void): ChildProcess => {
  const proc = spawn('python3', ['-m', 'graphrules', 'serve', ...args], {
    cwd: workDir,
    stdio: ['ignore', 'ignore', 'pipe'],
  });
  proc.stderr!.on('data', (chunk) => onStderr(String(chunk)));
  return proc;
};

const waitForHealth = async (base: string, whichStderr: () => string): Promise<void> => {
  for (let attempt = 0; attempt < 120; attempt++) {
    try {
      const r = await fetch(`${base}/health`);
      if (r.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`service at ${base} never became healthy:\n${whichStderr()}`);
};

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), 'hitl-ui-'));
  const corpus = join(workDir, 'corpus.jsonl');
  writeFileSync(corpus, corpusLines().join('\n') + '\n');
  mkdirSync(join(workDir, 'state'), { recursive: true });
  serverA = startService(
    ['--dataset', corpus, '--state-dir', join(workDir, 'state'), '--port', String(PORT)],
    (c) => (stderrA += c),
  );
  await waitForHealth(BASE, () => stderrA);
});

afterAll(() => {
  serverA?.kill('SIGTERM');
  serverB?.kill('SIGTERM');
  rmSync(workDir, { recursive: true, force: true });
});

describe('workbench against a live service', () => {
  const api = () => new ApiClient(BASE);

  it('runs the labeling workflow end to end', async () => {
    const controller = new Controller(api());
    const state = controller.state;

    await controller.bootstrap();
    expect(state.connected).toBe(true);
    expect(state.mode).toBe('simple');
    expect(state.classes).toEqual(['ed']);
    expect(state.rowsPage?.total).toBe(41);

    // ① browse: the selected row's DOT renders into SVG with its labels
    await controller.selectRow(0);
    expect(state.selectedRowSvg).not.toBeNull();
    expect(state.selectedRowSvg).toContain('>dump</text>');
    expect(state.selectedRowSvg).toContain('>entity2</text>');
    let html = renderApp(state);
    expect(html).toContain('>dump</text>');
    expect(html).toContain('page 1 of 1');

    await controller.selectClass('ed');
    expect(state.evaluation).not.toBeNull();
    expect(state.evaluation!.report.rules).toEqual([]);

    // ③ suggest: the invariant feature ranks first
    await controller.suggestRules();
    expect(state.suggestions?.length).toBeGreaterThan(0);
    const top = state.suggestions![0];
    expect(top.penman).toBe('(u_1 / entity2)');
    expect(top.tp).toBe(20);
    expect(top.fp).toBe(1);

    await controller.acceptSuggestion(0);
    expect(state.rules.classes.ed).toHaveLength(1);
    expect(state.evaluationStale).toBe(false); // re-evaluated after commit

    // ④ the metrics table is the /evaluate payload, byte for byte
    const direct = await fetch(`${BASE}/evaluate`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ class: 'ed', split: 'train' }),
    });
    const directText = await direct.text();
    expect(state.evaluation!.raw).toBe(directText);

    const tail = directText.slice(directText.lastIndexOf('"total"'));
    const literal = (key: string): string => {
      const m = tail.match(new RegExp(`"${key}":([-0-9.eE]+)`));
      if (!m) throw new Error(`no ${key} literal in payload tail: ${tail}`);
      return m[1];
    };
    html = renderApp(state);
    for (const key of ['tp', 'fp', 'fn', 'tn', 'precision', 'recall', 'f1']) {
      expect(html).toContain(`<td>${literal(key)}</td>`);
    }
    // the poison row makes precision a non-integral double: the payload
    // text and the rendered cell must still agree to the last digit
    expect(literal('precision')).toBe('0.9523809523809523');

    // ⑤ example pane counts equal the metric row's buckets
    const record = state.evaluation!.report.rules[0];
    expect(record.tp).toBe(20);
    expect(record.fp).toBe(1);
    expect(record.fn).toBe(0);
    controller.selectExampleRule(0);
    for (const kind of ['tp', 'fp', 'fn'] as const) {
      controller.selectExampleKind(kind);
      expect(exampleIds(state)).toHaveLength(record[kind]);
    }
    controller.selectExampleKind('fp');
    expect(exampleIds(state)).toEqual([20]); // the spoil row
    expect(renderApp(state)).toContain('<span id="example-count">1</span>');

    // inspecting an example highlights the rule's matched nodes
    await controller.inspectExample(20);
    expect(state.selectedRow?.id).toBe(20);
    expect(state.selectedRowSvg).toContain('>spoil</text>');
    expect(state.selectedRowSvg).toContain('class="node matched"');

    // deleting the only rule empties the evaluation table
    await controller.deleteRule(0);
    expect(state.rules.classes.ed ?? []).toHaveLength(0);
    expect(state.evaluation!.report.rules).toEqual([]);
    expect(renderApp(state)).not.toContain('<td>rule 0</td>');
    await controller.acceptSuggestion(0); // put it back
    expect(state.rules.classes.ed).toHaveLength(1);

    // ③ author a regex rule, then refine it
    controller.addRule();
    controller.editClause(1, 0, '(u_1 / .* :2 (u_2 / entity2))');
    expect(state.drafts[1].dirty).toBe(true);
    await controller.saveRule(1);
    expect(state.clauseErrors).toEqual({});
    expect(state.rules.classes.ed).toHaveLength(2);

    await controller.refinePreview(1, 0);
    const preview = state.refinePreview;
    expect(preview).not.toBeNull();
    const directRefine = await fetch(`${BASE}/refine`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ class: 'ed', rule_index: 1, clause_index: 0, apply: false }),
    });
    const refinePayload = (await directRefine.json()) as {
      accepted: { label: string }[];
      rejected: { label: string }[];
    };
    expect(preview!.accepted.map((s) => s.label)).toEqual(
      refinePayload.accepted.map((s) => s.label),
    );
    expect(preview!.accepted.map((s) => s.label)).toEqual([...PLANTED].sort());
    expect(preview!.rejected.map((s) => s.label)).toEqual(['spoil']);
    const previewHtml = renderApp(state);
    for (const s of refinePayload.accepted) {
      expect(previewHtml).toContain(`data-refine-label="${s.label}"`);
    }

    await controller.refineApply();
    expect(state.refinePreview).toBeNull();
    const refined = state.rules.classes.ed[1].clauses[0].penman;
    expect(refined).toContain('dump|insert|pack|pour|release');
    const rule1 = state.evaluation!.report.rules[1];
    expect(rule1.tp).toBe(20);
    expect(rule1.fp).toBe(0);

    // a clause that fails server-side validation never reaches the rules
    controller.addRule();
    controller.editClause(2, 0, '(broken');
    await controller.saveRule(2);
    expect(state.clauseErrors['2:0']).toMatch(/position/);
    expect(state.rules.classes.ed).toHaveLength(2);
    await controller.deleteRule(2); // uncommitted: local discard only
    expect(state.drafts).toHaveLength(2);
    expect(state.rules.classes.ed).toHaveLength(2);

    // a page reload (fresh controller) still sees the autosaved rules
    const reloaded = new Controller(api());
    await reloaded.bootstrap();
    expect(reloaded.state.rules.classes.ed).toHaveLength(2);
  });

  it('serves the edited rules read-only in inference mode', async () => {
    serverB = startService(
      ['--mode', 'inference', '--state-dir', join(workDir, 'state'), '--port', String(INFER_PORT)],
      (c) => (stderrB += c),
    );
    await waitForHealth(INFER_BASE, () => stderrB);

    const apiB = new ApiClient(INFER_BASE);
    const controller = new Controller(apiB);
    await controller.bootstrap();
    expect(controller.state.mode).toBe('inference');
    expect(controller.state.rules.classes.ed).toHaveLength(2);

    const html = renderApp(controller.state);
    expect(html).toContain('rules (read-only)');
    for (const action of ['save-rule', 'add-rule', 'suggest', 'refine-preview', 'select-class']) {
      expect(html).not.toContain(`data-action="${action}"`);
    }

    const predictions = await controller.predictText(
      '(x / pour :2 (y / entity2))\n(x / see0 :1 (y / thing0))',
    );
    expect(predictions).toEqual([['ed'], []]);

    const err = await apiB.putRules({ classes: {} }).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect((await apiB.rules()).classes.ed).toHaveLength(2); // untouched
  });
});
