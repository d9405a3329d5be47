/** Monotonic tickets for in-flight requests. A response is applied
 * only if its ticket is still the latest, so a slow answer can never
 * overwrite the state of a newer navigation. */
export class Sequence {
  private latest = 0;

  issue(): number {
    this.latest += 1;
    return this.latest;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.latest;
  }
}
