// Reconnecting websocket wrapper. On every (re)open the owner re-joins
// with the stored participant id; the server resyncs the pending trial.

export interface SocketEvents {
  onOpen: () => void;
  onMessage: (raw: string) => void;
  onClose: () => void;
}

export class ReconnectingSocket {
  private ws: WebSocket | null = null;
  private retries = 0;
  private closedByUser = false;

  constructor(private url: string, private events: SocketEvents) {}

  connect(): void {
    this.closedByUser = false;
    this.open();
  }

  private open(): void {
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.retries = 0;
      this.events.onOpen();
    };
    ws.onmessage = (event) => this.events.onMessage(String(event.data));
    ws.onclose = () => {
      this.events.onClose();
      if (!this.closedByUser) this.scheduleReconnect();
    };
    ws.onerror = () => {
      // onclose follows; nothing else to do here
    };
  }

  private scheduleReconnect(): void {
    const delay = Math.min(10_000, 500 * 2 ** Math.min(this.retries, 5));
    this.retries += 1;
    setTimeout(() => {
      if (!this.closedByUser) this.open();
    }, delay);
  }

  send(raw: string): boolean {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(raw);
      return true;
    }
    return false;
  }

  close(): void {
    this.closedByUser = true;
    this.ws?.close();
  }
}
