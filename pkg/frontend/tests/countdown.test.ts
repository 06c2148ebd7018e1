import { describe, expect, it } from 'vitest';

import { Countdown } from '../src/countdown.js';

function fakeNow(start = 0) {
  let now = start;
  return {
    now: () => now,
    advance: (ms: number) => {
      now += ms;
    },
  };
}

describe('Countdown', () => {
  it('ticks down the server-advised differential', () => {
    const clock = fakeNow();
    const cd = new Countdown(90 * 60, clock.now);
    expect(cd.remainingSeconds()).toBe(5400);
    clock.advance(60_000);
    expect(cd.remainingSeconds()).toBe(5340);
  });

  it('renders mm:ss', () => {
    const clock = fakeNow();
    const cd = new Countdown(5400, clock.now);
    expect(cd.display()).toBe('90:00');
    clock.advance(5399_000);
    expect(cd.display()).toBe('0:01');
  });

  it('expires exactly when the differential runs out', () => {
    const clock = fakeNow();
    let fired = 0;
    const cd = new Countdown(10, clock.now, () => fired++);
    clock.advance(9_999);
    expect(cd.expired()).toBe(false);
    clock.advance(1);
    expect(cd.expired()).toBe(true);
    expect(fired).toBe(1);
  });

  it('never unlocks after a server-declared expiry', () => {
    const clock = fakeNow();
    const cd = new Countdown(600, clock.now);
    cd.forceExpire();
    cd.sync(600); // a skewed later response must not reopen the session
    expect(cd.expired()).toBe(true);
    expect(cd.remainingSeconds()).toBe(0);
  });

  it('sync adopts fresh server values while active', () => {
    const clock = fakeNow();
    const cd = new Countdown(600, clock.now);
    clock.advance(100_000);
    cd.sync(450);
    expect(cd.remainingSeconds()).toBe(450);
  });

  it('remaining never goes negative', () => {
    const clock = fakeNow();
    const cd = new Countdown(1, clock.now);
    clock.advance(10_000);
    expect(cd.remainingSeconds()).toBe(0);
  });
});
