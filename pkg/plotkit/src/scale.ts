/** Axis scales and tick generation; linear plus decade-log for time. */

export interface Scale {
  (value: number): number;
  ticks: number[];
  domain: [number, number];
}

/** Round a step to a "nice" 1/2/5 multiple. */
function niceStep(rawStep: number): number {
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const fraction = rawStep / power;
  const nice = fraction <= 1 ? 1 : fraction <= 2 ? 2 : fraction <= 5 ? 5 : 10;
  return nice * power;
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
  tickCount = 6
): Scale {
  let [d0, d1] = domain;
  if (d0 === d1) {
    d0 -= 0.5;
    d1 += 0.5;
  }
  const step = niceStep((d1 - d0) / Math.max(1, tickCount));
  const ticks: number[] = [];
  for (let v = Math.ceil(d0 / step) * step; v <= d1 + 1e-9 * step; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  const scale = ((value: number) =>
    range[0] + ((value - d0) / (d1 - d0)) * (range[1] - range[0])) as Scale;
  scale.ticks = ticks;
  scale.domain = [d0, d1];
  return scale;
}

export function logScale(
  domain: [number, number],
  range: [number, number]
): Scale {
  const d0 = Math.max(domain[0], Number.MIN_VALUE);
  const d1 = Math.max(domain[1], d0 * 10);
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const ticks: number[] = [];
  for (let e = Math.ceil(l0 - 1e-9); e <= l1 + 1e-9; e += 1) {
    ticks.push(Math.pow(10, e));
  }
  const scale = ((value: number) =>
    range[0] +
    ((Math.log10(Math.max(value, d0)) - l0) / (l1 - l0)) *
      (range[1] - range[0])) as Scale;
  scale.ticks = ticks;
  scale.domain = [d0, d1];
  return scale;
}

/** Compact deterministic tick label. */
export function tickLabel(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    return value.toExponential(0).replace("+", "");
  }
  return Number(value.toPrecision(6)).toString();
}
