/**
 * DOM wiring for the rater flow: join a session, work through segments
 * one at a time with free back-navigation, review, finish. Served as a
 * static bundle by the collection service; all data comes from its API.
 */

import { ApiError, ServiceClient, SessionInfo, TaskPayload, submitWithRetry } from './api.js';
import { AutosaveManager } from './autosave.js';
import { Countdown } from './countdown.js';
import {
  TaskViewState,
  editComment,
  editPostedit,
  fromTask,
  inputsEnabled,
  markExpired,
  reviewStatus,
  submitLabel,
  tick,
  toSubmission,
  toggleFlag,
} from './state.js';

const FLAG_LABELS = ['terminology', 'omission', 'typography'] as const;

export class RaterApp {
  private session: SessionInfo | null = null;
  private state: TaskViewState | null = null;
  private index = 0;
  private tasks = new Map<number, TaskPayload>();
  private submitted = new Set<number>();
  private countdown: Countdown | null = null;
  private autosave: AutosaveManager | null = null;
  private ticker: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ServiceClient,
  ) {}

  async join(raterId: string): Promise<void> {
    this.session = await this.client.createSession(raterId);
    this.autosave = new AutosaveManager(
      window.localStorage,
      this.session.token,
      () => this.warn('another tab saved a newer draft for this segment; it was overwritten'),
      () => this.warn('local draft storage is unavailable; keep this tab open'),
    );
    const status = await this.client.getStatus(this.session.token);
    this.countdown = new Countdown(status.remaining_seconds, undefined, () => this.onExpired());
    this.ticker = setInterval(() => this.renderCountdown(), 1000);
    await this.show(0);
  }

  private async show(index: number): Promise<void> {
    if (!this.session || !this.countdown) return;
    try {
      const task = await this.client.getTask(this.session.token, index);
      this.index = index;
      this.tasks.set(index, task);
      this.countdown.sync(task.remaining_seconds);
      this.state = fromTask(task);
      const draft = this.autosave?.load(task.segment_id);
      if (draft) {
        this.state = {
          ...this.state,
          draftPostedit: draft.postedit,
          draftFlags: draft.flags,
          draftComment: draft.comment,
        };
      }
      this.render();
    } catch (err) {
      if (err instanceof ApiError && err.sessionOver) {
        this.onExpired();
      } else {
        this.warn('could not load the segment; check your connection and retry');
      }
    }
  }

  private async submit(): Promise<void> {
    if (!this.session || !this.state || !inputsEnabled(this.state)) return;
    const segmentId = this.state.task.segment_id;
    this.autosave?.markDirty();
    this.autosave?.save(segmentId, {
      postedit: this.state.draftPostedit,
      flags: this.state.draftFlags,
      comment: this.state.draftComment,
    });
    try {
      await submitWithRetry(this.client, this.session.token, this.index, toSubmission(this.state));
      this.submitted.add(this.index);
      this.autosave?.discard(segmentId);
      if (this.index + 1 < this.state.task.total) {
        await this.show(this.index + 1);
      } else {
        this.renderReview();
      }
    } catch (err) {
      if (err instanceof ApiError && err.sessionOver) {
        this.onExpired(); // draft stays in local storage
      } else {
        this.warn('submission failed after retries; your draft is kept locally');
      }
    }
  }

  private onExpired(): void {
    this.countdown?.forceExpire();
    if (this.state) {
      this.state = markExpired(this.state);
    }
    this.render();
  }

  private renderCountdown(): void {
    if (!this.countdown || !this.state) return;
    this.state = tick(this.state, this.countdown.remainingSeconds());
    const el = this.root.querySelector('.countdown');
    if (el) el.textContent = this.countdown.display();
    if (this.countdown.expired()) this.render();
  }

  private warn(message: string): void {
    const banner = this.root.querySelector('.warning');
    if (banner) banner.textContent = message;
  }

  private render(): void {
    if (!this.session || !this.state) return;
    const s = this.state;
    const enabled = inputsEnabled(s);
    const prev = this.tasks.get(this.index - 1);
    const next = this.tasks.get(this.index + 1);
    this.root.innerHTML = `
      <p class="instructions">${escapeHtml(this.session.instructions)}</p>
      <p class="warning"></p>
      ${s.phase === 'expired' ? '<p class="notice">time is up; remaining segments are excluded</p>' : ''}
      <p class="position">${s.task.position} of ${s.task.total}</p>
      <p class="countdown">${this.countdown?.display() ?? ''}</p>
      ${prev ? `<p class="context dimmed">${escapeHtml(prev.source)}</p>` : ''}
      <p class="source">${escapeHtml(s.task.source)}</p>
      ${next ? `<p class="context dimmed">${escapeHtml(next.source)}</p>` : ''}
      <textarea class="target" ${enabled ? '' : 'disabled'}>${escapeHtml(s.draftPostedit)}</textarea>
      ${FLAG_LABELS.map(
        (flag) => `<label><input type="checkbox" data-flag="${flag}"
          ${s.draftFlags[flag] ? 'checked' : ''} ${enabled ? '' : 'disabled'}>
          ${flag.charAt(0).toUpperCase() + flag.slice(1)}</label>`,
      ).join('')}
      <input class="comment" value="${escapeHtml(s.draftComment)}" ${enabled ? '' : 'disabled'}>
      <button class="back" ${this.index > 0 && enabled ? '' : 'disabled'}>back</button>
      <button class="submit" ${enabled ? '' : 'disabled'}>${submitLabel(s)}</button>
    `;
    this.wire();
  }

  private renderReview(): void {
    const rows = [...this.tasks.entries()]
      .sort(([a], [b]) => a - b)
      .map(([i, task]) => {
        const status = this.submitted.has(i) ? 'submitted' : 'pending';
        return `<li>${escapeHtml(task.segment_id)}: ${status}</li>`;
      })
      .join('');
    this.root.innerHTML = `<h2>session complete</h2><ul class="review">${rows}</ul>`;
  }

  private wire(): void {
    const target = this.root.querySelector<HTMLTextAreaElement>('.target');
    target?.addEventListener('input', () => {
      if (this.state) {
        this.state = editPostedit(this.state, target.value);
        this.autosave?.markDirty();
      }
    });
    target?.addEventListener('blur', () => this.flushDraft());
    this.root.querySelectorAll<HTMLInputElement>('[data-flag]').forEach((box) => {
      box.addEventListener('change', () => {
        if (this.state) {
          this.state = toggleFlag(this.state, box.dataset.flag as 'terminology');
          this.autosave?.markDirty();
          this.flushDraft();
        }
      });
    });
    const comment = this.root.querySelector<HTMLInputElement>('.comment');
    comment?.addEventListener('input', () => {
      if (this.state) {
        this.state = editComment(this.state, comment.value);
        this.autosave?.markDirty();
      }
    });
    this.root.querySelector('.back')?.addEventListener('click', () => {
      this.flushDraft();
      void this.show(this.index - 1);
    });
    this.root.querySelector('.submit')?.addEventListener('click', () => void this.submit());
  }

  private flushDraft(): void {
    if (this.state) {
      this.autosave?.save(this.state.task.segment_id, {
        postedit: this.state.draftPostedit,
        flags: this.state.draftFlags,
        comment: this.state.draftComment,
      });
    }
  }

  reviewStatusOf(index: number): 'edited' | 'unedited' | undefined {
    const task = this.tasks.get(index);
    if (!task || !this.state || this.state.task.segment_id !== task.segment_id) return undefined;
    return reviewStatus(this.state);
  }
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

declare global {
  interface Window {
    blindpeApp?: RaterApp;
  }
}

if (typeof document !== 'undefined') {
  const root = document.getElementById('app');
  const form = document.getElementById('join') as HTMLFormElement | null;
  if (root && form) {
    form.addEventListener('submit', (event) => {
      event.preventDefault();
      const raterId = (form.elements.namedItem('rater') as HTMLInputElement).value.trim();
      const app = new RaterApp(root, new ServiceClient(''));
      window.blindpeApp = app;
      form.hidden = true;
      void app.join(raterId);
    });
  }
}
