/**
 * Latest-wins ordering for overlapping async responses.
 *
 * Every request takes a ticket; a response may only be rendered when
 * its ticket is still the newest one issued. Anything older is stale
 * by definition (the user has asked for something newer) and is
 * dropped, so out-of-order completions can never paint the canvas
 * backwards.
 */
export class SequenceGate {
  private issued = 0;
  private rendered = 0;

  /** Take a ticket for a request about to be sent. */
  next(): number {
    return ++this.issued;
  }

  /**
   * True exactly once per ticket, and only while the ticket is the
   * newest issued. Marks the ticket rendered on success.
   */
  shouldRender(ticket: number): boolean {
    if (ticket !== this.issued || ticket === this.rendered) {
      return false;
    }
    this.rendered = ticket;
    return true;
  }

  /** The newest ticket handed out so far. */
  get latest(): number {
    return this.issued;
  }
}
