/**
 * Session countdown against a server-advised remaining time. Client and
 * server clocks are never compared directly; the client only ticks down
 * the differential the server last reported, so clock skew cannot extend
 * a session. The server stays authoritative: once expired locally or by
 * server verdict, the countdown never unlocks again.
 */

export class Countdown {
  private remainingMs: number;
  private syncedAt: number;
  private locked = false;

  constructor(
    remainingSeconds: number,
    private readonly now: () => number = () => Date.now(),
    private readonly onExpire: () => void = () => {},
  ) {
    this.remainingMs = remainingSeconds * 1000;
    this.syncedAt = this.now();
  }

  /** Adopt a fresh server-advised value, unless already expired. */
  sync(remainingSeconds: number): void {
    if (this.locked) {
      return;
    }
    this.remainingMs = remainingSeconds * 1000;
    this.syncedAt = this.now();
    this.check();
  }

  /** The server said the session is over; no later sync may reopen it. */
  forceExpire(): void {
    if (!this.locked) {
      this.locked = true;
      this.remainingMs = 0;
      this.onExpire();
    }
  }

  remainingSeconds(): number {
    if (this.locked) {
      return 0;
    }
    const elapsed = this.now() - this.syncedAt;
    return Math.max(0, Math.floor((this.remainingMs - elapsed) / 1000));
  }

  expired(): boolean {
    this.check();
    return this.locked;
  }

  /** mm:ss for the banner; 90 minutes renders as 90:00. */
  display(): string {
    const total = this.remainingSeconds();
    const minutes = Math.floor(total / 60);
    const seconds = total % 60;
    return `${minutes}:${String(seconds).padStart(2, '0')}`;
  }

  private check(): void {
    if (!this.locked && this.now() - this.syncedAt >= this.remainingMs) {
      this.forceExpire();
    }
  }
}
