/**
 * Local draft persistence. Drafts are stored per (session, segment) every
 * few seconds while dirty and on blur, and restored verbatim on reload.
 * A revision stamp detects a second tab writing the same draft slot;
 * last writer wins, with a visible warning instead of silent loss.
 */

export interface DraftRecord {
  postedit: string;
  flags: { terminology: boolean; omission: boolean; typography: boolean };
  comment: string;
  revision: number;
  writerId: string;
}

/** The subset of window.localStorage the manager needs; injectable. */
export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class AutosaveManager {
  private timer: ReturnType<typeof setInterval> | null = null;
  private dirty = false;
  private revision = 0;
  readonly writerId: string;

  constructor(
    private readonly storage: StorageLike,
    private readonly sessionToken: string,
    private readonly onConflict: () => void = () => {},
    private readonly onStorageError: () => void = () => {},
    writerId?: string,
  ) {
    this.writerId = writerId ?? Math.random().toString(36).slice(2);
  }

  private key(segmentId: string): string {
    return `blindpe-draft:${this.sessionToken}:${segmentId}`;
  }

  markDirty(): void {
    this.dirty = true;
  }

  /** Persist now (used on blur and before navigation). No-op when clean. */
  save(segmentId: string, draft: Omit<DraftRecord, 'revision' | 'writerId'>): void {
    if (!this.dirty) {
      return;
    }
    const existing = this.load(segmentId);
    if (existing && existing.writerId !== this.writerId && existing.revision > this.revision) {
      // another tab wrote a newer draft; we overwrite but say so
      this.onConflict();
      this.revision = existing.revision;
    }
    this.revision += 1;
    const record: DraftRecord = { ...draft, revision: this.revision, writerId: this.writerId };
    try {
      this.storage.setItem(this.key(segmentId), JSON.stringify(record));
      this.dirty = false;
    } catch {
      this.onStorageError();
    }
  }

  load(segmentId: string): DraftRecord | null {
    try {
      const raw = this.storage.getItem(this.key(segmentId));
      return raw === null ? null : (JSON.parse(raw) as DraftRecord);
    } catch {
      this.onStorageError();
      return null;
    }
  }

  discard(segmentId: string): void {
    try {
      this.storage.removeItem(this.key(segmentId));
    } catch {
      this.onStorageError();
    }
  }

  /** Periodic flush while editing; idle ticks write nothing. */
  start(segmentId: string, snapshot: () => Omit<DraftRecord, 'revision' | 'writerId'>, intervalMs = 3000): void {
    this.stop();
    this.timer = setInterval(() => this.save(segmentId, snapshot()), intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
