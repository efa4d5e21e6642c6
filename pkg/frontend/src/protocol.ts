/** Wire protocol types for the play service (protocol version 1). */

export const PROTOCOL_VERSION = 1;

export type Orientation = "up" | "down" | "left" | "right";
export type Held = "tomato" | "dish" | "soup" | null;

export interface FramePlayer {
  position: [number, number];
  orientation: Orientation;
  held: Held;
}

export interface FramePot {
  position: [number, number];
  tomato_count: number;
  progress: number;
  phase: "filling" | "cooking" | "ready";
}

export interface FrameCounterItem {
  cell: [number, number];
  item: "tomato" | "dish" | "soup";
}

export interface FrameMessage {
  v: number;
  type: "frame";
  tick: number;
  grid: string[];
  players: FramePlayer[];
  pots: FramePot[];
  counter_items: FrameCounterItem[];
  score: number;
}

export interface PhaseMessage {
  v: number;
  type: "phase";
  phase: "tutorial" | "practice" | "playing" | "preference" | "debrief" | "done";
  payload: Record<string, unknown>;
}

export interface EpisodeEndMessage {
  v: number;
  type: "episode_end";
  episode: number;
  deliveries: number;
}

export interface ErrorMessage {
  v: number;
  type: "error";
  detail: string;
}

export type ServerMessage = FrameMessage | PhaseMessage | EpisodeEndMessage | ErrorMessage;

export interface InputMessage {
  type: "input";
  action: number;
}

export interface PreferenceMessage {
  type: "preference";
  rating: number;
}

export interface AdvanceMessage {
  type: "advance";
}

export type ClientMessage = InputMessage | PreferenceMessage | AdvanceMessage;

// Action indices shared with the environment.
export const NOOP = 0;
export const MOVE_UP = 1;
export const MOVE_DOWN = 2;
export const MOVE_LEFT = 3;
export const MOVE_RIGHT = 4;
export const INTERACT = 5;
