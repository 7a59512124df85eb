/*
 * One in-flight request per panel: responses superseded by newer input are
 * discarded instead of clobbering fresher state.
 */

export class LatestOnly {
  private sequence = 0;

  /** Wrap an async producer; the consumer only runs for the newest call. */
  async run<T>(producer: () => Promise<T>, consumer: (value: T) => void): Promise<boolean> {
    const ticket = ++this.sequence;
    const value = await producer();
    if (ticket !== this.sequence) {
      return false; // a newer request superseded this one
    }
    consumer(value);
    return true;
  }
}
