/**
 * ClientView: the entire client state, produced purely from server messages.
 * No game logic runs here; the reducer just records what the server said.
 */

import { EpisodeEndMessage, FrameMessage, PhaseMessage, ServerMessage } from "./protocol";

export interface TutorialPage {
  title: string;
  body: string;
}

export interface PreferencePrompt {
  episodePair: [number, number];
  partnerAColor: string;
  partnerBColor: string;
  scale: number[];
}

export interface ClientView {
  phase: string;
  pages: TutorialPage[];
  pageIndex: number;
  frame: FrameMessage | null;
  score: number;
  episode: number | null;
  totalEpisodes: number | null;
  layout: string | null;
  partnerColor: string | null;
  yourSeat: number | null;
  lastEpisodeEnd: EpisodeEndMessage | null;
  preference: PreferencePrompt | null;
  pendingRating: number | null;
  confirmingRating: boolean;
  error: string | null;
}

export function initialView(): ClientView {
  return {
    phase: "connecting",
    pages: [],
    pageIndex: 0,
    frame: null,
    score: 0,
    episode: null,
    totalEpisodes: null,
    layout: null,
    partnerColor: null,
    yourSeat: null,
    lastEpisodeEnd: null,
    preference: null,
    pendingRating: null,
    confirmingRating: false,
    error: null,
  };
}

function onPhase(view: ClientView, msg: PhaseMessage): ClientView {
  const next: ClientView = { ...view, phase: msg.phase, error: null };
  const p = msg.payload as Record<string, any>;
  if (msg.phase === "tutorial") {
    next.pages = (p.pages ?? []) as TutorialPage[];
    next.pageIndex = 0;
  } else if (msg.phase === "practice") {
    next.layout = (p.layout as string) ?? null;
    next.yourSeat = (p.your_seat as number) ?? 0;
    next.frame = null;
    next.score = 0;
  } else if (msg.phase === "playing") {
    next.episode = (p.episode as number) ?? null;
    next.totalEpisodes = (p.total_episodes as number) ?? null;
    next.layout = (p.layout as string) ?? null;
    next.partnerColor = (p.partner_color as string) ?? null;
    next.yourSeat = (p.your_seat as number) ?? null;
    next.frame = null;
    next.score = 0;
    next.preference = null;
    next.pendingRating = null;
    next.confirmingRating = false;
  } else if (msg.phase === "preference") {
    next.preference = {
      episodePair: (p.episode_pair as [number, number]) ?? [0, 1],
      partnerAColor: (p.partner_a_color as string) ?? "A",
      partnerBColor: (p.partner_b_color as string) ?? "B",
      scale: (p.scale as number[]) ?? [-2, -1, 0, 1, 2],
    };
    next.pendingRating = 0;
    next.confirmingRating = false;
  }
  return next;
}

export function reduce(view: ClientView, msg: ServerMessage): ClientView {
  switch (msg.type) {
    case "frame":
      return { ...view, frame: msg, score: msg.score };
    case "phase":
      return onPhase(view, msg);
    case "episode_end":
      return { ...view, lastEpisodeEnd: msg };
    case "error":
      return { ...view, error: msg.detail };
    default:
      return view;
  }
}

/** Local-only UI movements; still pure state transitions. */
export function nextPage(view: ClientView): ClientView {
  return { ...view, pageIndex: Math.min(view.pageIndex + 1, Math.max(view.pages.length - 1, 0)) };
}

export function selectRating(view: ClientView, rating: number): ClientView {
  if (!view.preference || !view.preference.scale.includes(rating)) return view;
  return { ...view, pendingRating: rating, confirmingRating: false };
}

export function confirmRating(view: ClientView): ClientView {
  if (view.pendingRating === null) return view;
  return { ...view, confirmingRating: true };
}

export function cancelConfirm(view: ClientView): ClientView {
  return { ...view, confirmingRating: false };
}
