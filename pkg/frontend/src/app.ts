/**
 * Browser entry point: session setup, WebSocket wiring, canvas painting.
 * All state lives in the ClientView; this file only wires events.
 */

import { InputCapture } from "./input";
import { ClientMessage, ServerMessage } from "./protocol";
import { renderView } from "./render";
import {
  ClientView,
  cancelConfirm,
  confirmRating,
  initialView,
  nextPage,
  reduce,
  selectRating,
} from "./view";

interface AppElements {
  screen: HTMLPreElement;
  status: HTMLElement;
}

export class App {
  view: ClientView = initialView();
  input = new InputCapture();
  ws: WebSocket | null = null;
  sessionId: string | null = null;
  private submittedPair: string | null = null;

  constructor(private elements: AppElements, private baseUrl: string = "") {}

  async start(participantToken: string): Promise<void> {
    const stored = sessionStorage.getItem("cookbench-session");
    if (stored) {
      this.sessionId = stored;
      const resp = await fetch(`${this.baseUrl}/sessions/${stored}`);
      if (!resp.ok) this.sessionId = null;
    }
    if (!this.sessionId) {
      const resp = await fetch(`${this.baseUrl}/sessions`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ participant_token: participantToken }),
      });
      const body = await resp.json();
      this.sessionId = body.session_id as string;
      sessionStorage.setItem("cookbench-session", this.sessionId);
    }
    this.connect();
  }

  connect(): void {
    const proto = location.protocol === "https:" ? "wss" : "ws";
    const ws = new WebSocket(`${proto}://${location.host}${this.baseUrl}/sessions/${this.sessionId}/ws`);
    this.ws = ws;
    ws.onmessage = (ev) => this.onServerMessage(JSON.parse(ev.data) as ServerMessage);
    ws.onclose = () => {
      this.elements.status.textContent = "connection lost - reconnecting...";
      setTimeout(() => this.connect(), 1000);
    };
    ws.onopen = () => {
      this.elements.status.textContent = "connected";
    };
  }

  send(msg: ClientMessage): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify(msg));
    }
  }

  onServerMessage(msg: ServerMessage): void {
    const before = this.view.phase;
    this.view = reduce(this.view, msg);
    if (msg.type === "frame") {
      // One input message per tick window, held keys auto-repeat.
      const action = this.input.poll();
      if (action !== null && (this.view.phase === "playing" || this.view.phase === "practice")) {
        this.send({ type: "input", action });
      }
    }
    if (this.view.phase !== before) {
      this.submittedPair = null;
      this.input.clear();
    }
    this.paint();
  }

  onKeyDown(code: string): void {
    const phase = this.view.phase;
    if (phase === "tutorial") {
      if (code === "Enter") {
        if (this.view.pageIndex >= this.view.pages.length - 1) {
          this.send({ type: "advance" });
        } else {
          this.view = nextPage(this.view);
        }
        this.paint();
      }
      return;
    }
    if (phase === "preference") {
      const digit = Number.parseInt(code.replace("Digit", ""), 10);
      if (digit >= 1 && digit <= 5 && this.view.preference) {
        this.view = selectRating(this.view, this.view.preference.scale[digit - 1]);
      } else if (code === "Enter") {
        if (this.view.confirmingRating) {
          const pairKey = JSON.stringify(this.view.preference?.episodePair);
          if (this.submittedPair !== pairKey && this.view.pendingRating !== null) {
            this.submittedPair = pairKey; // client-side double-submit guard
            this.send({ type: "preference", rating: this.view.pendingRating });
          }
        } else {
          this.view = confirmRating(this.view);
        }
      } else if (code === "Escape") {
        this.view = cancelConfirm(this.view);
      }
      this.paint();
      return;
    }
    if (phase === "debrief") {
      if (code === "Enter") this.send({ type: "advance" });
      return;
    }
    if (this.input.keyDown(code)) {
      // movement/interact handled on the next frame poll
    }
  }

  onKeyUp(code: string): void {
    this.input.keyUp(code);
  }

  paint(): void {
    this.elements.screen.textContent = renderView(this.view);
  }
}

export function mount(): void {
  const screen = document.getElementById("screen") as HTMLPreElement;
  const status = document.getElementById("status") as HTMLElement;
  const app = new App({ screen, status });
  window.addEventListener("keydown", (ev) => {
    app.onKeyDown(ev.code === " " ? "Space" : ev.code);
    if (["ArrowUp", "ArrowDown", "ArrowLeft", "ArrowRight", "Space"].includes(ev.code)) {
      ev.preventDefault();
    }
  });
  window.addEventListener("keyup", (ev) => app.onKeyUp(ev.code));
  const token = new URLSearchParams(location.search).get("token") ?? "anonymous";
  void app.start(token);
}

if (typeof document !== "undefined" && document.getElementById("screen")) {
  mount();
}
