import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";

import { ServerMessage } from "../src/protocol";
import { renderView } from "../src/render";
import { cancelConfirm, confirmRating, initialView, reduce, selectRating } from "../src/view";

const here = dirname(fileURLToPath(import.meta.url));
const fixture: ServerMessage[] = JSON.parse(readFileSync(join(here, "fixtures", "frames.json"), "utf-8"));

function replay(messages: ServerMessage[]): string {
  let view = initialView();
  const screens: string[] = [];
  for (const msg of messages) {
    view = reduce(view, msg);
    screens.push(renderView(view));
  }
  return screens.join("\n====\n");
}

describe("thin client replay", () => {
  it("renders a recorded frame stream to byte-identical snapshots", () => {
    const first = replay(fixture);
    const second = replay(fixture);
    expect(second).toBe(first);
    expect(first).toMatchSnapshot();
  });

  it("is a pure function of received messages", () => {
    const view = initialView();
    Object.freeze(view);
    const frame = fixture.find((m) => m.type === "frame")!;
    const a = reduce(view, frame);
    const b = reduce(view, frame);
    expect(a).toEqual(b);
    expect(view.frame).toBeNull(); // input untouched
  });
});

describe("reducer", () => {
  it("tracks phase payloads", () => {
    let view = initialView();
    view = reduce(view, {
      v: 1,
      type: "phase",
      phase: "playing",
      payload: { episode: 3, total_episodes: 20, layout: "ring", partner_color: "pink", your_seat: 1 },
    });
    expect(view.phase).toBe("playing");
    expect(view.episode).toBe(3);
    expect(view.partnerColor).toBe("pink");
    expect(view.yourSeat).toBe(1);
    expect(view.score).toBe(0);
  });

  it("updates score from frames", () => {
    let view = initialView();
    const frame = fixture.find((m) => m.type === "frame" && m.score === 0)!;
    view = reduce(view, frame);
    expect(view.score).toBe(0);
    view = reduce(view, { ...(frame as any), score: 2 });
    expect(view.score).toBe(2);
  });

  it("shows error banners", () => {
    let view = initialView();
    view = reduce(view, { v: 1, type: "error", detail: "malformed frame" });
    expect(view.error).toBe("malformed frame");
    expect(renderView(view)).toContain("malformed frame");
  });
});

describe("pot progress rendering", () => {
  it("renders a half bar at progress 0.5", () => {
    let view = initialView();
    view = reduce(view, { v: 1, type: "phase", phase: "playing", payload: { episode: 0, layout: "cramped", your_seat: 0 } });
    view = reduce(view, {
      v: 1,
      type: "frame",
      tick: 10,
      grid: ["###", "#.#", "###"],
      players: [
        { position: [1, 1], orientation: "up", held: null },
        { position: [1, 1], orientation: "up", held: null },
      ],
      pots: [{ position: [0, 1], tomato_count: 3, progress: 0.5, phase: "cooking" }],
      counter_items: [],
      score: 0,
    });
    const text = renderView(view);
    expect(text).toContain("[#####-----]");
  });
});

describe("preference prompt state", () => {
  const prompt: ServerMessage = {
    v: 1,
    type: "phase",
    phase: "preference",
    payload: { episode_pair: [2, 3], partner_a_color: "blue", partner_b_color: "pink", scale: [-2, -1, 0, 1, 2] },
  };

  it("selects the midpoint as rating zero", () => {
    let view = reduce(initialView(), prompt);
    view = selectRating(view, view.preference!.scale[2]);
    expect(view.pendingRating).toBe(0);
  });

  it("requires confirmation before submit and supports backing out", () => {
    let view = reduce(initialView(), prompt);
    view = selectRating(view, 2);
    expect(view.confirmingRating).toBe(false);
    view = confirmRating(view);
    expect(view.confirmingRating).toBe(true);
    view = cancelConfirm(view);
    expect(view.confirmingRating).toBe(false);
    expect(view.pendingRating).toBe(2);
  });

  it("rejects off-scale ratings", () => {
    let view = reduce(initialView(), prompt);
    const before = view.pendingRating;
    view = selectRating(view, 7);
    expect(view.pendingRating).toBe(before);
  });
});
