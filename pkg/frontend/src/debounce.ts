/** Debounce plus a monotonic token so stale responses lose to newer input. */

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void, delayMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    clearTimeout(timer);
    timer = setTimeout(() => fn(...args), delayMs);
  };
}

export class LatestWins {
  private seq = 0;

  /** Claim a token for a new request. */
  next(): number {
    return ++this.seq;
  }

  /** True iff no newer request was started since `token`. */
  isCurrent(token: number): boolean {
    return token === this.seq;
  }
}
