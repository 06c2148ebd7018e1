/**
 * View state for the one-segment-at-a-time flow. Pure functions over a
 * plain object so every transition is unit-testable without a DOM.
 */

import type { ErrorFlags, Submission, TaskPayload } from './api.js';

export type SessionPhase = 'active' | 'expired' | 'finished';

export interface TaskViewState {
  task: TaskPayload;
  draftPostedit: string;
  draftFlags: ErrorFlags;
  draftComment: string;
  dirty: boolean;
  remainingSeconds: number;
  phase: SessionPhase;
}

export const EMPTY_FLAGS: ErrorFlags = { terminology: false, omission: false, typography: false };

/** A fresh segment: textarea prefilled with the served target, flags off. */
export function fromTask(task: TaskPayload, phase: SessionPhase = 'active'): TaskViewState {
  return {
    task,
    draftPostedit: task.target,
    draftFlags: { ...EMPTY_FLAGS },
    draftComment: '',
    dirty: false,
    remainingSeconds: task.remaining_seconds,
    phase,
  };
}

export function editPostedit(state: TaskViewState, text: string): TaskViewState {
  if (!inputsEnabled(state)) {
    return state;
  }
  return { ...state, draftPostedit: text, dirty: true };
}

export function toggleFlag(state: TaskViewState, flag: keyof ErrorFlags): TaskViewState {
  if (!inputsEnabled(state)) {
    return state;
  }
  const flags = { ...state.draftFlags, [flag]: !state.draftFlags[flag] };
  return { ...state, draftFlags: flags, dirty: true };
}

export function editComment(state: TaskViewState, text: string): TaskViewState {
  if (!inputsEnabled(state)) {
    return state;
  }
  return { ...state, draftComment: text, dirty: true };
}

export function tick(state: TaskViewState, remainingSeconds: number): TaskViewState {
  const phase = remainingSeconds <= 0 && state.phase === 'active' ? 'expired' : state.phase;
  return { ...state, remainingSeconds: Math.max(0, remainingSeconds), phase };
}

/** The server declared the session over; this is never undone locally. */
export function markExpired(state: TaskViewState): TaskViewState {
  return { ...state, phase: 'expired', remainingSeconds: 0 };
}

export function inputsEnabled(state: TaskViewState): boolean {
  return state.phase === 'active' && state.remainingSeconds > 0;
}

export function submitEnabled(state: TaskViewState): boolean {
  // submitting without edits is one click: a copied target is valid work
  return inputsEnabled(state);
}

/** Label for the primary button; the last segment finishes the session. */
export function submitLabel(state: TaskViewState): string {
  return state.task.position === state.task.total ? 'finish' : 'submit';
}

/** The exact wire payload: all three flags always present. */
export function toSubmission(state: TaskViewState): Submission {
  return {
    postedit: state.draftPostedit,
    flags: {
      terminology: state.draftFlags.terminology,
      omission: state.draftFlags.omission,
      typography: state.draftFlags.typography,
    },
    comment: state.draftComment === '' ? null : state.draftComment,
  };
}

/** Per-segment review status shown before finish: edited or unedited only,
 * never a diff. */
export function reviewStatus(state: TaskViewState): 'edited' | 'unedited' {
  return state.draftPostedit === state.task.target &&
    state.draftFlags.terminology === false &&
    state.draftFlags.omission === false &&
    state.draftFlags.typography === false &&
    state.draftComment === ''
    ? 'unedited'
    : 'edited';
}
