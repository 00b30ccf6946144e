/** Small shared helpers: rate limiting, event hub, toasts, color ramp. */

export type Unsubscribe = () => void;

/**
 * Trailing-edge rate limiter: the wrapped function runs at most once per
 * `intervalMs`, and the latest suppressed call always runs at the end of
 * the window (slider storms resolve to the final position).
 */
export function rateLimit<A extends unknown[]>(
  fn: (...args: A) => void,
  intervalMs: number,
): (...args: A) => void {
  let last = -Infinity;
  let timer: ReturnType<typeof setTimeout> | null = null;
  let pending: A | null = null;
  const fire = (args: A) => {
    last = Date.now();
    fn(...args);
  };
  return (...args: A) => {
    const wait = last + intervalMs - Date.now();
    if (wait <= 0 && timer === null) {
      fire(args);
      return;
    }
    pending = args;
    if (timer === null) {
      timer = setTimeout(() => {
        timer = null;
        if (pending !== null) {
          const args2 = pending;
          pending = null;
          fire(args2);
        }
      }, Math.max(wait, 0));
    }
  };
}

/** Minimal typed pub/sub used to link the views. */
export class Hub<Events extends Record<string, unknown>> {
  private listeners = new Map<keyof Events, Set<(payload: never) => void>>();

  on<K extends keyof Events>(event: K, fn: (payload: Events[K]) => void): Unsubscribe {
    let set = this.listeners.get(event);
    if (!set) {
      set = new Set();
      this.listeners.set(event, set);
    }
    set.add(fn as (payload: never) => void);
    return () => set!.delete(fn as (payload: never) => void);
  }

  emit<K extends keyof Events>(event: K, payload: Events[K]): void {
    this.listeners.get(event)?.forEach((fn) => (fn as (p: Events[K]) => void)(payload));
  }
}

export function toast(message: string, kind: "info" | "error" = "info"): void {
  const host = document.getElementById("toasts");
  if (!host) return;
  const el = document.createElement("div");
  el.className = `toast toast-${kind}`;
  el.textContent = message;
  host.appendChild(el);
  setTimeout(() => el.remove(), 4000);
}

// compact viridis-style ramp (the API grid is already in [0, 1])
const RAMP: [number, number, number][] = [
  [68, 1, 84], [71, 44, 122], [59, 81, 139], [44, 113, 142], [33, 144, 141],
  [39, 173, 129], [92, 200, 99], [170, 220, 50], [253, 231, 37],
];

export function rampColor(v: number): [number, number, number] {
  const t = Math.min(1, Math.max(0, v)) * (RAMP.length - 1);
  const i = Math.min(RAMP.length - 2, Math.floor(t));
  const f = t - i;
  return [
    Math.round(RAMP[i][0] + f * (RAMP[i + 1][0] - RAMP[i][0])),
    Math.round(RAMP[i][1] + f * (RAMP[i + 1][1] - RAMP[i][1])),
    Math.round(RAMP[i][2] + f * (RAMP[i + 1][2] - RAMP[i][2])),
  ];
}
