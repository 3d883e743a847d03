// Follow-up review: the patient's sessions plotted chronologically with
// per-item scores, a totals trend line across month marks, and media
// thumbnails fetched lazily on demand.

import { GatewayClient, GatewayError, SessionView } from "../api.js";
import { clear, h } from "../dom.js";

function trendLine(sessions: SessionView[]): SVGElement {
  // the one place the client does arithmetic on scores: plotting the
  // totals the server reported, never recomputing them
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("class", "totals-trend");
  svg.setAttribute("viewBox", "0 0 240 80");
  const totals = sessions.map((s) => s.total);
  const peak = Math.max(1, ...totals);
  const points = totals
    .map((total, i) => {
      const x = sessions.length === 1 ? 120 : 10 + (220 * i) / (sessions.length - 1);
      const y = 70 - (60 * total) / peak;
      return `${x},${y}`;
    })
    .join(" ");
  const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
  line.setAttribute("points", points);
  line.setAttribute("fill", "none");
  line.setAttribute("stroke", "currentColor");
  svg.append(line);
  return svg;
}

export function historyView(client: GatewayClient, patientId: string): HTMLElement {
  const root = h("section", { class: "history-view" }, h("h2", {}, "Follow-up timeline"));
  const body = h("div", { class: "history-body" }, "Loading…");
  root.append(body);

  void (async () => {
    clear(body);
    let sessions: SessionView[];
    try {
      sessions = (await client.getHistory(patientId)).sessions;
    } catch (err) {
      if (err instanceof GatewayError && err.code === "NOT_FOUND") {
        body.append(
          h("div", { class: "empty-state" },
            h("p", {}, "No patient found under that identifier."),
            h("a", { href: "#/", class: "re-search" }, "Search again")),
        );
        return;
      }
      body.append(h("p", { class: "load-error" }, String(err)));
      return;
    }
    if (sessions.length === 0) {
      body.append(h("p", { class: "empty-state" }, "No examinations recorded yet."));
      return;
    }
    body.append(trendLine(sessions));
    const list = h("ol", { class: "timeline" });
    for (const session of sessions) {
      const node = h(
        "li",
        { class: "timeline-node", "data-session-id": session.session_id },
        h("h3", {},
          `${session.category}${session.month_mark != null ? ` @ ${session.month_mark} months` : ""}`),
        h("p", { class: "session-meta" }, `${session.timestamp} — ${session.status}`),
        h("p", { class: "session-total" }, `Total: ${session.total}`),
        h(
          "ul",
          { class: "item-scores" },
          ...session.items.map((item) =>
            h("li", {}, `${item.item_id}: ${item.score}`),
          ),
        ),
      );
      const thumbs = h("div", { class: "thumb-grid" });
      for (const item of session.items) {
        for (const media of item.media) {
          const thumb = h("button", {
            class: "thumb",
            type: "button",
            "data-hash": media.hash,
            onclick: () => {
              // fetched lazily: the full image only loads on click
              const full = h("img", {
                class: "full-media",
                src: client.mediaUrl(media.hash),
                alt: `evidence ${media.hash.slice(0, 8)}`,
              });
              node.append(full);
            },
          }, media.kind === "sequence" ? `▶ ${media.frame_count} frames` : "frame");
          thumbs.append(thumb);
        }
      }
      node.append(thumbs);
      list.append(node);
    }
    body.append(list);
  })();

  return root;
}
