export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  /** Drop any pending call. */
  cancel(): void;
  /** Run a pending call immediately. */
  flush(): void;
}

/**
 * Trailing-edge debounce: `fn` runs once `wait` ms after the last
 * call, with the last call's arguments. While events keep arriving
 * the timer resets, so invocations are always at least `wait` ms
 * apart; at 150 ms that caps a dragged slider below 7 requests/s.
 */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  wait = 150,
): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | undefined;
  let pending: A | undefined;

  const invoke = () => {
    timer = undefined;
    if (pending !== undefined) {
      const args = pending;
      pending = undefined;
      fn(...args);
    }
  };

  const debounced = (...args: A) => {
    pending = args;
    if (timer !== undefined) {
      clearTimeout(timer);
    }
    timer = setTimeout(invoke, wait);
  };

  debounced.cancel = () => {
    if (timer !== undefined) {
      clearTimeout(timer);
      timer = undefined;
    }
    pending = undefined;
  };

  debounced.flush = () => {
    if (timer !== undefined) {
      clearTimeout(timer);
      invoke();
    }
  };

  return debounced;
}
