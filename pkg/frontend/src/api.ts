/** Typed client for the rule service. All state lives server-side; this
 * wrapper adds error shaping and serializes mutating requests so at most
 * one is in flight at a time. */

import type {
  EvalReport,
  Health,
  Proposal,
  RefineResponse,
  RowsPage,
  RuleJson,
  RulesFile,
  SuggestResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`${status}: ${detail}`);
  }
}

/** Network-level failure (server unreachable), distinct from HTTP errors. */
export class ConnectionError extends Error {}

type Fetch = typeof fetch;

const detailText = (body: unknown): string => {
  if (typeof body === 'object' && body !== null && 'detail' in body) {
    const detail = (body as { detail: unknown }).detail;
    if (typeof detail === 'string') return detail;
    if (Array.isArray(detail)) {
      return detail
        .map((d) => `${(d.loc ?? []).join('.')}: ${d.msg ?? ''}`)
        .join('; ');
    }
  }
  return JSON.stringify(body);
};

export class ApiClient {
  private mutationChain: Promise<unknown> = Promise.resolve();

  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: Fetch = (...args) => fetch(...args),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (e) {
      throw new ConnectionError(String(e));
    }
    if (!response.ok) {
      let body: unknown;
      try {
        body = await response.json();
      } catch {
        body = { detail: response.statusText };
      }
      throw new ApiError(response.status, detailText(body));
    }
    return response;
  }

  private async getJson<T>(path: string): Promise<T> {
    return (await this.request(path)).json() as Promise<T>;
  }

  private send<T>(method: string, path: string, body?: unknown): Promise<T> {
    // mutations are queued: the next one starts only after the previous settles
    const run = () =>
      this.request(path, {
        method,
        headers: { 'content-type': 'application/json' },
        body: body === undefined ? undefined : JSON.stringify(body),
      }).then((r) => r.json() as Promise<T>);
    const next = this.mutationChain.then(run, run);
    this.mutationChain = next.catch(() => undefined);
    return next;
  }

  health(): Promise<Health> {
    return this.getJson('/health');
  }

  classes(): Promise<{ classes: string[] }> {
    return this.getJson('/classes');
  }

  rows(params: {
    page?: number;
    pageSize?: number;
    split?: string;
    classLabel?: string;
  }): Promise<RowsPage> {
    const q = new URLSearchParams();
    if (params.page) q.set('page', String(params.page));
    if (params.pageSize) q.set('page_size', String(params.pageSize));
    if (params.split) q.set('split', params.split);
    if (params.classLabel) q.set('class', params.classLabel);
    const qs = q.toString();
    return this.getJson(`/rows${qs ? '?' + qs : ''}`);
  }

  rowDot(rowId: number, highlight?: { classLabel: string; ruleIndex: number }): Promise<string> {
    const q = highlight
      ? `?class=${encodeURIComponent(highlight.classLabel)}&rule=${highlight.ruleIndex}`
      : '';
    return this.request(`/rows/${rowId}/dot${q}`).then((r) => r.text());
  }

  rules(): Promise<RulesFile> {
    return this.getJson('/rules');
  }

  putRules(file: RulesFile): Promise<RulesFile> {
    return this.send('PUT', '/rules', file);
  }

  addRule(classLabel: string, rule: RuleJson): Promise<{ class: string; index: number } & RulesFile> {
    return this.send('POST', `/rules/${encodeURIComponent(classLabel)}`, rule);
  }

  deleteRule(classLabel: string, index: number): Promise<RulesFile> {
    return this.send('DELETE', `/rules/${encodeURIComponent(classLabel)}/${index}`);
  }

  /** Returns both the parsed report and the exact response text; the
   * metrics table must reproduce the payload rather than recompute it. */
  async evaluate(classLabel: string, split: string): Promise<{ raw: string; report: EvalReport }> {
    const response = await this.request('/evaluate', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ class: classLabel, split }),
    });
    const raw = await response.text();
    return { raw, report: JSON.parse(raw) as EvalReport };
  }

  suggest(classLabel: string, k?: number, method?: string): Promise<SuggestResponse> {
    return this.send('POST', '/suggest', {
      class: classLabel,
      ...(k !== undefined ? { k } : {}),
      ...(method !== undefined ? { method } : {}),
    });
  }

  refine(params: {
    classLabel: string;
    ruleIndex: number;
    clauseIndex?: number;
    threshold?: number;
    apply?: boolean;
  }): Promise<RefineResponse> {
    return this.send('POST', '/refine', {
      class: params.classLabel,
      rule_index: params.ruleIndex,
      clause_index: params.clauseIndex ?? 0,
      ...(params.threshold !== undefined ? { threshold: params.threshold } : {}),
      apply: params.apply ?? false,
    });
  }

  predict(penman: string[]): Promise<string[][]> {
    return this.send('POST', '/predict', { penman });
  }

  proposals(): Promise<{ proposals: Proposal[] }> {
    return this.send('POST', '/proposals');
  }

  acceptProposal(rowId: number): Promise<{ row_id: number; labels: string[]; split: string }> {
    return this.send('POST', `/proposals/${rowId}/accept`);
  }
}
