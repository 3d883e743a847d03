// The examination console: for each catalog item the recommended templates
// render side by side next to the captured frame, the examiner picks the one
// matching the infant's state, and the skeleton overlay can be toggled over
// the frame to help the comparison.

import { GatewayClient, GatewayError } from "../api.js";
import { clear, h } from "../dom.js";
import { ExamConsoleState, previewsFromResult, refreshSession } from "../state.js";

export interface ExamHandlers {
  onClosed: (patientId: string) => void;
}

export function examConsole(
  client: GatewayClient,
  state: ExamConsoleState,
  handlers: ExamHandlers,
): HTMLElement {
  const root = h("section", { class: "exam-console" });
  const dialog = h("div", { class: "dialog", role: "alertdialog", hidden: true });
  const warning = h("div", { class: "overlay-warning", role: "status", hidden: true });

  function showDialog(message: string, reloadPrompt = false): void {
    clear(dialog);
    dialog.hidden = false;
    dialog.append(h("p", {}, message));
    if (reloadPrompt) {
      dialog.append(
        h("button", {
          class: "reload-prompt",
          onclick: () => window.location.reload(),
        }, "Reload to pick up the latest state"),
      );
    }
    dialog.append(h("button", { class: "dismiss", onclick: () => (dialog.hidden = true) }, "Dismiss"));
  }

  function showWarning(message: string): void {
    warning.hidden = false;
    warning.textContent = message;
  }

  async function selectTemplate(itemId: string, templateId: string): Promise<void> {
    state.drafts.set(itemId, templateId);
    render();
    try {
      const ack = await client.recordItem(
        state.session.session_id,
        itemId,
        templateId,
        [],
        state.version,
      );
      state.version = ack.version;
      state.drafts.delete(itemId);
      await refreshSession(client, state); // history panel updates after ack
    } catch (err) {
      state.drafts.delete(itemId);
      if (err instanceof GatewayError && err.code === "STALE_VERSION") {
        showDialog("Another console changed this session.", true);
      } else if (err instanceof GatewayError) {
        showDialog(err.message);
      } else {
        showDialog(String(err));
      }
    }
    render();
  }

  async function handleFrame(bytes: ArrayBuffer): Promise<void> {
    try {
      const result = await client.skeletonize(bytes);
      state.stagePreviews = previewsFromResult(result);
      state.framePreview = state.stagePreviews.input;
      warning.hidden = true;
    } catch (err) {
      if (err instanceof GatewayError && err.code === "NO_FOREGROUND") {
        // degraded mode: keep showing the raw frame, warn non-blockingly
        showWarning("No infant silhouette found in this frame; overlay unavailable.");
        state.stagePreviews = null;
      } else if (err instanceof GatewayError) {
        showDialog(err.message);
      } else {
        showDialog(String(err));
      }
    }
    render();
  }

  async function closeSession(): Promise<void> {
    try {
      const summary = await client.closeSession(state.session.session_id);
      state.drafts.clear(); // invariant: drafts do not outlive the session
      await refreshSession(client, state);
      render();
      showDialog(
        `Session closed. Total score ${summary.total}` +
          (summary.incomplete ? " (incomplete examination)" : ""),
      );
      dialog.append(
        h("a", { href: `#/history/${state.patient.id}`, class: "go-history" },
          "Open the follow-up timeline"),
      );
      handlers.onClosed(state.patient.id);
    } catch (err) {
      showDialog(err instanceof GatewayError ? err.message : String(err));
    }
  }

  function render(): void {
    clear(root);
    const catalog = state.catalog;
    const item = catalog.items[state.currentItemIndex];
    const recorded = new Map(state.session.items.map((r) => [r.item_id, r.selected_template_id]));
    const closed = state.session.status === "closed";

    const header = h(
      "header",
      {},
      h("h2", {}, `${catalog.category === "neonatal" ? "Neonatal" : "Follow-up"} examination`),
      h("p", { class: "patient-line" }, `${state.patient.name} — ${state.patient.id}`),
      h(
        "p",
        { class: "step-indicator", "data-step": String(state.currentItemIndex + 1) },
        `Item ${state.currentItemIndex + 1} of ${catalog.items.length}`,
      ),
    );

    const cards = h("div", { class: "template-cards" });
    for (const template of item.templates) {
      const chosen =
        state.drafts.get(item.id) === template.id || recorded.get(item.id) === template.id;
      const card = h(
        "button",
        {
          class: `template-card${chosen ? " chosen" : ""}`,
          "data-template-id": template.id,
          type: "button",
          onclick: () => {
            if (!closed) void selectTemplate(item.id, template.id);
          },
        },
        template.image_ref
          ? h("img", { src: template.image_ref, alt: template.label })
          : h("div", { class: "placeholder-card" }, template.label),
        h("span", { class: "template-label" }, template.label),
        h("span", { class: "template-score" }, `score ${template.score}`),
      );
      if (chosen) card.setAttribute("aria-pressed", "true");
      cards.append(card);
    }

    const itemPanel = h(
      "div",
      { class: "item-panel" },
      h("h3", { class: "item-name" }, item.name),
      cards,
      h(
        "nav",
        { class: "item-nav" },
        h("button", {
          class: "prev-item",
          type: "button",
          onclick: () => {
            state.currentItemIndex = Math.max(0, state.currentItemIndex - 1);
            render();
          },
        }, "Previous"),
        h("button", {
          class: "next-item",
          type: "button",
          onclick: () => {
            state.currentItemIndex = Math.min(
              catalog.items.length - 1,
              state.currentItemIndex + 1,
            );
            render();
          },
        }, "Next"),
        h("button", {
          class: "close-session",
          type: "button",
          onclick: () => void closeSession(),
          disabled: closed,
        }, closed ? "Session closed" : "Close session"),
      ),
    );

    const frameInput = h("input", {
      type: "file",
      class: "frame-input",
      accept: ".ppm,.pgm,.png,image/png",
    }) as HTMLInputElement;
    frameInput.addEventListener("change", () => {
      const file = frameInput.files?.[0];
      if (!file) return;
      const reader = new FileReader();
      reader.onload = () => {
        void handleFrame(reader.result as ArrayBuffer);
      };
      reader.readAsArrayBuffer(file);
    });

    const frameStack = h("div", { class: "frame-stack" });
    if (state.framePreview) {
      frameStack.append(
        h("img", { class: "frame-image", src: state.framePreview, alt: "examination frame" }),
      );
      if (state.stagePreviews) {
        const overlay = h("img", {
          class: "skeleton-overlay",
          src: state.stagePreviews.skeleton,
          alt: "skeleton overlay",
        });
        if (!state.overlayOn) overlay.setAttribute("hidden", "");
        frameStack.append(overlay);
      }
    } else {
      frameStack.append(h("p", { class: "frame-empty" }, "Upload or drop a captured frame."));
    }

    const overlayToggle = h("button", {
      class: "overlay-toggle",
      type: "button",
      onclick: () => {
        state.overlayOn = !state.overlayOn;
        render();
      },
    }, state.overlayOn ? "Hide skeleton overlay" : "Show skeleton overlay") as HTMLButtonElement;

    const framePanel = h(
      "div",
      { class: "frame-panel" },
      h("h3", {}, "Captured frame"),
      frameInput,
      frameStack,
      overlayToggle,
      warning,
    );

    const historyPanel = h(
      "aside",
      { class: "session-history" },
      h("h3", {}, "Recorded this session"),
      h(
        "ul",
        {},
        ...state.session.items.map((r) =>
          h(
            "li",
            { "data-item-id": r.item_id },
            `${r.item_id}: ${r.selected_template_id} (score ${r.score})`,
          ),
        ),
      ),
      h("p", { class: "running-total" }, `Running total: ${state.session.total}`),
    );

    root.append(header, itemPanel, framePanel, historyPanel, dialog);
  }

  render();
  return root;
}
