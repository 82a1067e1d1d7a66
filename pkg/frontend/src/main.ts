/** Browser entry: mount the workbench, delegate events by data-action. */

import { ApiClient } from './api.js';
import { Controller } from './app.js';
import { renderApp } from './render.js';

const API_BASE =
  new URLSearchParams(window.location.search).get('api') ?? 'http://127.0.0.1:8000';

const root = document.getElementById('app');
if (root) {
  const controller = new Controller(new ApiClient(API_BASE), () => {
    root.innerHTML = renderApp(controller.state);
  });

  const num = (el: HTMLElement, name: string) => Number(el.dataset[name]);

  root.addEventListener('click', (event) => {
    const el = (event.target as HTMLElement).closest<HTMLElement>('[data-action]');
    if (!el) return;
    switch (el.dataset.action) {
      case 'retry':
        controller.retry();
        break;
      case 'prev-page':
        controller.loadRows(controller.state.page - 1);
        break;
      case 'next-page':
        controller.loadRows(controller.state.page + 1);
        break;
      case 'select-row':
        controller.selectRow(num(el, 'row'));
        break;
      case 'copy-penman':
        navigator.clipboard?.writeText(el.dataset.penman ?? '');
        break;
      case 'toggle-negated':
        controller.toggleNegated(num(el, 'rule'), num(el, 'clause'));
        break;
      case 'add-clause':
        controller.addClause(num(el, 'rule'));
        break;
      case 'remove-clause':
        controller.removeClause(num(el, 'rule'), num(el, 'clause'));
        break;
      case 'add-rule':
        controller.addRule();
        break;
      case 'save-rule':
        controller.saveRule(num(el, 'rule'));
        break;
      case 'delete-rule':
        controller.deleteRule(num(el, 'rule'));
        break;
      case 'suggest':
        controller.suggestRules();
        break;
      case 'accept-suggestion':
        controller.acceptSuggestion(num(el, 'suggestion'));
        break;
      case 'refine-preview':
        controller.refinePreview(num(el, 'rule'), num(el, 'clause'));
        break;
      case 'refine-apply':
        controller.refineApply();
        break;
      case 'refine-cancel':
        controller.refineCancel();
        break;
      case 'select-example-kind':
        controller.selectExampleKind(el.dataset.kind as 'tp' | 'fp' | 'fn');
        break;
      case 'select-example-rule':
        controller.selectExampleRule(
          el.dataset.rule === 'total' ? 'total' : num(el, 'rule'),
        );
        break;
      case 'inspect-example':
        controller.inspectExample(num(el, 'row'));
        break;
      case 'load-proposals':
        controller.loadProposals();
        break;
      case 'accept-proposal':
        controller.acceptProposal(num(el, 'row'));
        break;
      case 'predict': {
        const input = root.querySelector<HTMLTextAreaElement>('#predict-input');
        if (input) {
          controller.predictText(input.value).then((labels) => {
            const out = root.querySelector('#predict-output');
            if (out && labels) out.textContent = JSON.stringify(labels, null, 2);
          });
        }
        break;
      }
    }
  });

  root.addEventListener('change', (event) => {
    const el = event.target as HTMLElement;
    if (el.matches('select[data-action="select-class"]')) {
      controller.selectClass((el as HTMLSelectElement).value || null);
    } else if (el.matches('select[data-action="select-split"]')) {
      controller.selectSplit((el as HTMLSelectElement).value);
    } else if (el.matches('textarea[data-action="edit-clause"]')) {
      // change (not input) so the textarea keeps focus while typing
      const area = el as HTMLTextAreaElement;
      controller.editClause(
        Number(area.dataset.rule),
        Number(area.dataset.clause),
        area.value,
      );
    }
  });

  controller.bootstrap();
}
