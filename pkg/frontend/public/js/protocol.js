/** Wire protocol types for the play service (protocol version 1). */
export const PROTOCOL_VERSION = 1;
// Action indices shared with the environment.
export const NOOP = 0;
export const MOVE_UP = 1;
export const MOVE_DOWN = 2;
export const MOVE_LEFT = 3;
export const MOVE_RIGHT = 4;
export const INTERACT = 5;
