/**
 * Keyboard capture: arrow keys move, space interacts. The app polls once per
 * received frame, so at most one input message leaves per tick window, and
 * held keys repeat on every poll.
 */
import { INTERACT, MOVE_DOWN, MOVE_LEFT, MOVE_RIGHT, MOVE_UP } from "./protocol";
const KEY_ACTIONS = {
    ArrowUp: MOVE_UP,
    ArrowDown: MOVE_DOWN,
    ArrowLeft: MOVE_LEFT,
    ArrowRight: MOVE_RIGHT,
    Space: INTERACT,
    " ": INTERACT,
};
export class InputCapture {
    constructor() {
        this.held = [];
        this.enabled = true;
    }
    keyDown(code) {
        if (!(code in KEY_ACTIONS))
            return false; // unmapped keys ignored
        this.held = this.held.filter((k) => k !== code);
        this.held.push(code); // most recent press wins
        return true;
    }
    keyUp(code) {
        this.held = this.held.filter((k) => k !== code);
    }
    /** One action per poll (per server tick); null when idle or disabled. */
    poll() {
        if (!this.enabled || this.held.length === 0)
            return null;
        return KEY_ACTIONS[this.held[this.held.length - 1]];
    }
    clear() {
        this.held = [];
    }
}
