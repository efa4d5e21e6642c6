/**
 * Deterministic text rendering of a ClientView. The canvas painter draws from
 * the same strings, so snapshot tests over these lines pin down everything the
 * participant sees.
 */

import { ClientView } from "./view";
import { FrameMessage } from "./protocol";

const ORIENT_GLYPH: Record<string, string> = { up: "^", down: "v", left: "<", right: ">" };
const HELD_GLYPH: Record<string, string> = { tomato: "t", dish: "d", soup: "s" };

export function renderGrid(frame: FrameMessage, yourSeat: number | null): string[] {
  const rows = frame.grid.map((row) => row.split(""));
  for (const item of frame.counter_items) {
    const [r, c] = item.cell;
    rows[r][c] = HELD_GLYPH[item.item] ?? "?";
  }
  for (const pot of frame.pots) {
    const [r, c] = pot.position;
    if (pot.phase === "ready") {
      rows[r][c] = "R";
    } else if (pot.phase === "cooking") {
      rows[r][c] = "C";
    } else {
      rows[r][c] = String(pot.tomato_count);
    }
  }
  frame.players.forEach((p, seat) => {
    const [r, c] = p.position;
    const self = yourSeat !== null && seat === yourSeat;
    rows[r][c] = self ? ORIENT_GLYPH[p.orientation] : "@";
  });
  return rows.map((row) => row.join(""));
}

function potBars(frame: FrameMessage): string[] {
  return frame.pots.map((pot, i) => {
    const filled = Math.round(pot.progress * 10);
    const bar = "#".repeat(filled) + "-".repeat(10 - filled);
    return `pot${i} [${bar}] ${pot.phase} (${pot.tomato_count} tomato)`;
  });
}

export function renderView(view: ClientView): string {
  const lines: string[] = [`phase: ${view.phase}`];
  if (view.error) lines.push(`! ${view.error}`);

  if (view.phase === "tutorial") {
    const page = view.pages[view.pageIndex];
    lines.push(`page ${view.pageIndex + 1}/${view.pages.length}`);
    if (page) {
      lines.push(page.title, page.body);
    }
    lines.push("[enter: next / start]");
  } else if (view.phase === "practice" || view.phase === "playing") {
    if (view.phase === "playing") {
      lines.push(
        `episode ${view.episode !== null ? view.episode + 1 : "?"}/${view.totalEpisodes ?? "?"}` +
          ` on ${view.layout ?? "?"} with the ${view.partnerColor ?? "?"} chef`,
      );
    } else {
      lines.push(`practice on ${view.layout ?? "?"}: deliver one soup to continue`);
    }
    lines.push(`score: ${view.score}`);
    if (view.frame) {
      lines.push(...renderGrid(view.frame, view.yourSeat));
      lines.push(...potBars(view.frame));
      lines.push(`tick ${view.frame.tick}`);
    } else {
      lines.push("(waiting for first frame)");
    }
  } else if (view.phase === "preference") {
    const p = view.preference!;
    lines.push(
      `Which partner did you prefer: ${p.partnerAColor} (episode ${p.episodePair[0] + 1})` +
        ` or ${p.partnerBColor} (episode ${p.episodePair[1] + 1})?`,
    );
    // Ratings are signed toward partner A: +2 means strongly prefer A.
    const labels = [
      `much prefer ${p.partnerBColor}`,
      `prefer ${p.partnerBColor}`,
      "no preference",
      `prefer ${p.partnerAColor}`,
      `much prefer ${p.partnerAColor}`,
    ];
    p.scale.forEach((value, i) => {
      const marker = view.pendingRating === value ? ">" : " ";
      lines.push(`${marker} [${i + 1}] ${labels[i]}`);
    });
    lines.push(view.confirmingRating ? "[enter: confirm / esc: back]" : "[1-5 select, enter: review]");
  } else if (view.phase === "debrief") {
    lines.push("All episodes complete. Thank you!", "[enter: finish]");
    if (view.lastEpisodeEnd) {
      lines.push(`last episode deliveries: ${view.lastEpisodeEnd.deliveries}`);
    }
  } else if (view.phase === "done") {
    lines.push("Session closed.");
  }
  return lines.join("\n");
}
