/** Workbench controller: owns the state, talks to the service, and calls
 * `notify` after every change so the host can re-render. All committed rule
 * changes trigger a re-evaluation so panels ④/⑤ stay current. */

import { ApiClient, ApiError, ConnectionError } from './api.js';
import { parseDot } from './dot.js';
import { layoutGraph } from './layout.js';
import { renderSvg } from './svg.js';
import {
  draftsFromRules,
  initialState,
  markDirty,
  type WorkbenchState,
} from './state.js';

export class Controller {
  readonly state: WorkbenchState = initialState();

  constructor(
    readonly api: ApiClient,
    private readonly notify: () => void = () => {},
  ) {}

  private changed(): void {
    this.notify();
  }

  /** Wrap an action: busy flag, connection banner, inline API errors. */
  private async run(action: () => Promise<void>, onApiError?: (e: ApiError) => void) {
    this.state.busy = true;
    this.state.banner = null;
    this.changed();
    try {
      await action();
      this.state.connected = true;
    } catch (e) {
      if (e instanceof ConnectionError) {
        this.state.connected = false;
      } else if (e instanceof ApiError && onApiError) {
        onApiError(e);
      } else if (e instanceof ApiError) {
        this.state.banner = e.detail;
      } else {
        this.state.banner = String(e);
      }
    } finally {
      this.state.busy = false;
      this.changed();
    }
  }

  async bootstrap(): Promise<void> {
    await this.run(async () => {
      const health = await this.api.health();
      this.state.mode = health.mode;
      this.state.rules = await this.api.rules();
      if (health.mode === 'inference') return;
      this.state.classes = (await this.api.classes()).classes;
      await this.loadRowsNow();
    });
  }

  retry(): Promise<void> {
    return this.bootstrap();
  }

  private async loadRowsNow(): Promise<void> {
    this.state.rowsPage = await this.api.rows({
      page: this.state.page,
      pageSize: this.state.pageSize,
      split: this.state.split || undefined,
    });
  }

  loadRows(page: number): Promise<void> {
    return this.run(async () => {
      this.state.page = Math.max(1, page);
      await this.loadRowsNow();
    });
  }

  selectSplit(split: string): Promise<void> {
    this.state.split = split;
    this.state.page = 1;
    return this.loadRows(1);
  }

  /** Load a row into the graph panel, optionally with a rule's matched
   * nodes highlighted. Falls back to the PENMAN text if DOT fails. */
  selectRow(rowId: number, highlightRule?: number): Promise<void> {
    return this.run(async () => {
      const row = await this.findRow(rowId);
      const highlight =
        highlightRule !== undefined && this.state.selectedClass
          ? { classLabel: this.state.selectedClass, ruleIndex: highlightRule }
          : undefined;
      const dot = await this.api.rowDot(rowId, highlight);
      this.state.selectedRow = row;
      try {
        this.state.selectedRowSvg = renderSvg(layoutGraph(parseDot(dot)));
      } catch (e) {
        console.error('DOT render failed:', e);
        this.state.selectedRowSvg = null;
      }
    });
  }

  private async findRow(rowId: number) {
    const here = this.state.rowsPage?.rows.find((r) => r.id === rowId);
    if (here) return here;
    // row ids are dense and file-ordered, so an unfiltered page lookup works
    const page = Math.floor(rowId / this.state.pageSize) + 1;
    const fetched = await this.api.rows({ page, pageSize: this.state.pageSize });
    return (
      fetched.rows.find((r) => r.id === rowId) ?? {
        id: rowId,
        text: '',
        penman: '',
        labels: [],
        split: '',
      }
    );
  }

  selectClass(label: string | null): Promise<void> {
    return this.run(async () => {
      this.state.selectedClass = label;
      this.state.suggestions = null;
      this.state.refinePreview = null;
      this.state.clauseErrors = {};
      this.state.evaluation = null;
      this.state.evaluationStale = false;
      this.state.exampleRule = 'total';
      this.state.drafts = draftsFromRules(this.state);
      if (label) await this.evaluateNow();
    });
  }

  private evalSplit(): string {
    return this.state.split || 'train';
  }

  private async evaluateNow(): Promise<void> {
    const label = this.state.selectedClass;
    if (!label) return;
    try {
      this.state.evaluation = await this.api.evaluate(label, this.evalSplit());
      this.state.evaluationStale = false;
    } catch (e) {
      if (e instanceof ApiError) {
        this.state.evaluation = null;
        this.state.banner = e.detail;
      } else {
        throw e;
      }
    }
  }

  evaluate(): Promise<void> {
    return this.run(() => this.evaluateNow());
  }

  private async refreshRules(): Promise<void> {
    this.state.rules = await this.api.rules();
    this.state.drafts = draftsFromRules(this.state);
    this.state.evaluationStale = true;
    await this.evaluateNow(); // committed change → re-evaluate ④/⑤
  }

  // -- draft editing (local until saved) --------------------------------

  editClause(ruleIndex: number, clauseIndex: number, penman: string): void {
    this.state.drafts[ruleIndex].clauses[clauseIndex].penman = penman;
    markDirty(this.state, ruleIndex);
    delete this.state.clauseErrors[`${ruleIndex}:${clauseIndex}`];
    this.changed();
  }

  toggleNegated(ruleIndex: number, clauseIndex: number): void {
    const clause = this.state.drafts[ruleIndex].clauses[clauseIndex];
    clause.negated = !clause.negated;
    markDirty(this.state, ruleIndex);
    this.changed();
  }

  addClause(ruleIndex: number): void {
    this.state.drafts[ruleIndex].clauses.push({ penman: '', negated: false });
    markDirty(this.state, ruleIndex);
    this.changed();
  }

  removeClause(ruleIndex: number, clauseIndex: number): void {
    this.state.drafts[ruleIndex].clauses.splice(clauseIndex, 1);
    markDirty(this.state, ruleIndex);
    this.changed();
  }

  addRule(): void {
    this.state.drafts.push({ clauses: [{ penman: '', negated: false }], dirty: true });
    this.changed();
  }

  /** Validate each clause with a server round-trip before committing the
   * rule, so syntax errors land on the offending clause box. */
  saveRule(ruleIndex: number): Promise<void> {
    return this.run(async () => {
      const label = this.state.selectedClass;
      if (!label) return;
      const draft = this.state.drafts[ruleIndex];
      for (let ci = 0; ci < draft.clauses.length; ci++) {
        try {
          await this.api.predict([draft.clauses[ci].penman]);
        } catch (e) {
          if (e instanceof ApiError) {
            this.state.clauseErrors[`${ruleIndex}:${ci}`] = e.detail;
            return;
          }
          throw e;
        }
      }
      const rules = (this.state.rules.classes[label] ?? []).map((r) => ({
        clauses: r.clauses.map((c) => ({ ...c })),
      }));
      const updated = { clauses: draft.clauses.map((c) => ({ ...c })) };
      if (ruleIndex < rules.length) rules[ruleIndex] = updated;
      else rules.push(updated);
      try {
        await this.api.putRules({
          classes: { ...this.state.rules.classes, [label]: rules },
        });
      } catch (e) {
        if (e instanceof ApiError) {
          this.state.clauseErrors[`${ruleIndex}:0`] = e.detail;
          return;
        }
        throw e;
      }
      await this.refreshRules();
    });
  }

  deleteRule(ruleIndex: number): Promise<void> {
    return this.run(async () => {
      const label = this.state.selectedClass;
      if (!label) return;
      const committed = this.state.rules.classes[label] ?? [];
      if (ruleIndex < committed.length) {
        await this.api.deleteRule(label, ruleIndex);
        await this.refreshRules();
      } else {
        this.state.drafts.splice(ruleIndex, 1); // never committed
      }
    });
  }

  suggestRules(): Promise<void> {
    return this.run(async () => {
      const label = this.state.selectedClass;
      if (!label) return;
      this.state.suggestions = (await this.api.suggest(label)).suggestions;
    });
  }

  acceptSuggestion(index: number): Promise<void> {
    return this.run(async () => {
      const label = this.state.selectedClass;
      const suggestion = this.state.suggestions?.[index];
      if (!label || !suggestion) return;
      await this.api.addRule(label, {
        clauses: [{ penman: suggestion.penman, negated: false }],
      });
      await this.refreshRules();
    });
  }

  refinePreview(ruleIndex: number, clauseIndex: number): Promise<void> {
    return this.run(
      async () => {
        const label = this.state.selectedClass;
        if (!label) return;
        this.state.refinePreview = await this.api.refine({
          classLabel: label,
          ruleIndex,
          clauseIndex,
          apply: false,
        });
      },
      (e) => {
        this.state.clauseErrors[`${ruleIndex}:${clauseIndex}`] = e.detail;
      },
    );
  }

  refineApply(): Promise<void> {
    return this.run(async () => {
      const preview = this.state.refinePreview;
      const label = this.state.selectedClass;
      if (!preview || !label) return;
      await this.api.refine({
        classLabel: label,
        ruleIndex: preview.rule_index,
        clauseIndex: preview.clause_index,
        apply: true,
      });
      this.state.refinePreview = null;
      await this.refreshRules();
    });
  }

  refineCancel(): void {
    this.state.refinePreview = null;
    this.changed();
  }

  selectExampleKind(kind: 'tp' | 'fp' | 'fn'): void {
    this.state.exampleKind = kind;
    this.changed();
  }

  selectExampleRule(rule: number | 'total'): void {
    this.state.exampleRule = rule;
    this.changed();
  }

  /** Open an example row with the selected rule's match highlighted. */
  inspectExample(rowId: number): Promise<void> {
    const rule = this.state.exampleRule;
    return this.selectRow(rowId, typeof rule === 'number' ? rule : undefined);
  }

  loadProposals(): Promise<void> {
    return this.run(async () => {
      this.state.proposals = (await this.api.proposals()).proposals;
    });
  }

  acceptProposal(rowId: number): Promise<void> {
    return this.run(async () => {
      await this.api.acceptProposal(rowId);
      this.state.proposals =
        this.state.proposals?.filter((p) => p.row_id !== rowId) ?? null;
      await this.loadRowsNow();
      this.state.evaluationStale = true; // gold labels changed
      await this.evaluateNow();
    });
  }

  predictText(text: string): Promise<string[][] | null> {
    const lines = text
      .split('\n')
      .map((l) => l.trim())
      .filter((l) => l.length > 0);
    let result: string[][] | null = null;
    return this.run(() =>
      this.api.predict(lines).then((r) => {
        result = r;
      }),
    ).then(() => result);
  }
}
