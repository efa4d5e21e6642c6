/**
 * ClientView: the entire client state, produced purely from server messages.
 * No game logic runs here; the reducer just records what the server said.
 */
export function initialView() {
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
function onPhase(view, msg) {
    const next = { ...view, phase: msg.phase, error: null };
    const p = msg.payload;
    if (msg.phase === "tutorial") {
        next.pages = (p.pages ?? []);
        next.pageIndex = 0;
    }
    else if (msg.phase === "practice") {
        next.layout = p.layout ?? null;
        next.yourSeat = p.your_seat ?? 0;
        next.frame = null;
        next.score = 0;
    }
    else if (msg.phase === "playing") {
        next.episode = p.episode ?? null;
        next.totalEpisodes = p.total_episodes ?? null;
        next.layout = p.layout ?? null;
        next.partnerColor = p.partner_color ?? null;
        next.yourSeat = p.your_seat ?? null;
        next.frame = null;
        next.score = 0;
        next.preference = null;
        next.pendingRating = null;
        next.confirmingRating = false;
    }
    else if (msg.phase === "preference") {
        next.preference = {
            episodePair: p.episode_pair ?? [0, 1],
            partnerAColor: p.partner_a_color ?? "A",
            partnerBColor: p.partner_b_color ?? "B",
            scale: p.scale ?? [-2, -1, 0, 1, 2],
        };
        next.pendingRating = 0;
        next.confirmingRating = false;
    }
    return next;
}
export function reduce(view, msg) {
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
export function nextPage(view) {
    return { ...view, pageIndex: Math.min(view.pageIndex + 1, Math.max(view.pages.length - 1, 0)) };
}
export function selectRating(view, rating) {
    if (!view.preference || !view.preference.scale.includes(rating))
        return view;
    return { ...view, pendingRating: rating, confirmingRating: false };
}
export function confirmRating(view) {
    if (view.pendingRating === null)
        return view;
    return { ...view, confirmingRating: true };
}
export function cancelConfirm(view) {
    return { ...view, confirmingRating: false };
}
