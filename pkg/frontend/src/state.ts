/** Workbench state. Everything the panels render comes from here; the
 * evaluation view is always the latest server payload, never recomputed
 * client-side. */

import type {
  EvalReport,
  Mode,
  Proposal,
  RefineResponse,
  RowJson,
  RowsPage,
  RulesFile,
  Suggestion,
} from './types.js';

export interface DraftClause {
  penman: string;
  negated: boolean;
}

export interface DraftRule {
  clauses: DraftClause[];
  dirty: boolean; // differs from the committed rule (unsaved marker)
}

export type ExampleKind = 'tp' | 'fp' | 'fn';

export interface WorkbenchState {
  connected: boolean;
  mode: Mode | null;
  classes: string[];
  selectedClass: string | null;
  split: string;
  page: number;
  pageSize: number;
  rowsPage: RowsPage | null;
  selectedRow: RowJson | null;
  selectedRowSvg: string | null; // null = DOT render failed, show PENMAN only
  rules: RulesFile;
  drafts: DraftRule[]; // editable copies of selectedClass's rules
  suggestions: Suggestion[] | null;
  refinePreview: RefineResponse | null;
  evaluation: { raw: string; report: EvalReport } | null;
  evaluationStale: boolean; // rules changed since the last evaluate
  exampleRule: number | 'total';
  exampleKind: ExampleKind;
  proposals: Proposal[] | null;
  banner: string | null;
  clauseErrors: Record<string, string>; // `${ruleIndex}:${clauseIndex}` -> message
  busy: boolean;
}

export const initialState = (): WorkbenchState => ({
  connected: true,
  mode: null,
  classes: [],
  selectedClass: null,
  split: 'train',
  page: 1,
  pageSize: 50,
  rowsPage: null,
  selectedRow: null,
  selectedRowSvg: null,
  rules: { classes: {} },
  drafts: [],
  suggestions: null,
  refinePreview: null,
  evaluation: null,
  evaluationStale: false,
  exampleRule: 'total',
  exampleKind: 'tp',
  proposals: null,
  banner: null,
  clauseErrors: {},
  busy: false,
});

/** Same arithmetic the server uses: 1600 rows at page size 50 -> 32. */
export const pageCount = (total: number, pageSize: number): number =>
  total === 0 ? 0 : Math.ceil(total / pageSize);

export const draftsFromRules = (state: WorkbenchState): DraftRule[] => {
  const rules = state.selectedClass ? (state.rules.classes[state.selectedClass] ?? []) : [];
  return rules.map((r) => ({
    clauses: r.clauses.map((c) => ({ penman: c.penman, negated: c.negated })),
    dirty: false,
  }));
};

/** Committed rule the draft at `index` corresponds to, if any. */
export const committedRule = (state: WorkbenchState, index: number) => {
  const rules = state.selectedClass ? (state.rules.classes[state.selectedClass] ?? []) : [];
  return index < rules.length ? rules[index] : null;
};

export const markDirty = (state: WorkbenchState, index: number): void => {
  const committed = committedRule(state, index);
  const draft = state.drafts[index];
  draft.dirty =
    committed === null ||
    committed.clauses.length !== draft.clauses.length ||
    committed.clauses.some(
      (c, i) => c.penman !== draft.clauses[i].penman || c.negated !== draft.clauses[i].negated,
    );
};

/** Bucket ids for the example pane, straight from the metric record. */
export const exampleIds = (state: WorkbenchState): number[] => {
  if (!state.evaluation) return [];
  const report = state.evaluation.report;
  const record =
    state.exampleRule === 'total' ? report.total : report.rules[state.exampleRule];
  if (!record) return [];
  switch (state.exampleKind) {
    case 'tp':
      return record.true_positive_ids;
    case 'fp':
      return record.false_positive_ids;
    case 'fn':
      return record.false_negative_ids;
  }
};
