// Hash-routed shell. Routes carry every identifier the views need, so a
// reload rebuilds the console purely from gateway reads.

import { GatewayClient, GatewayError } from "./api.js";
import { clear, h } from "./dom.js";
import { reconstructExamState } from "./state.js";
import { examConsole } from "./views/exam.js";
import { historyView } from "./views/history.js";
import { registrationView } from "./views/registration.js";

function homeView(client: GatewayClient, navigate: (hash: string) => void): HTMLElement {
  const lookupInput = h("input", {
    class: "patient-lookup",
    placeholder: "Patient ID",
  }) as HTMLInputElement;
  const message = h("p", { class: "lookup-message" });

  async function startExam(category: string): Promise<void> {
    const pid = lookupInput.value.trim();
    if (!pid) {
      message.textContent = "Enter the patient identifier first.";
      return;
    }
    try {
      const session = await client.startSession(pid, category);
      navigate(`#/exam/${pid}/${session.id}`);
    } catch (err) {
      message.textContent = err instanceof GatewayError ? `${err.code}: ${err.message}` : String(err);
    }
  }

  return h(
    "section",
    { class: "home" },
    h("h2", {}, "HINE examiner console"),
    h("p", {}, "Register a new patient, or enter an ID for a follow-up visit."),
    h("a", { href: "#/register", class: "go-register" }, "New patient registration"),
    h(
      "div",
      { class: "follow-up" },
      lookupInput,
      h("button", {
        class: "start-neonatal",
        type: "button",
        onclick: () => void startExam("neonatal"),
      }, "Begin neonatal examination"),
      h("button", {
        class: "start-post-neonatal",
        type: "button",
        onclick: () => void startExam("post_neonatal"),
      }, "Begin follow-up examination"),
      h("button", {
        class: "view-history",
        type: "button",
        onclick: () => {
          const pid = lookupInput.value.trim();
          if (pid) navigate(`#/history/${pid}`);
        },
      }, "View history"),
      message,
    ),
  );
}

export class App {
  constructor(
    readonly client: GatewayClient,
    readonly mount: HTMLElement,
  ) {}

  navigate = (hash: string): void => {
    window.location.hash = hash;
    void this.render();
  };

  async render(): Promise<void> {
    const hash = window.location.hash || "#/";
    const parts = hash.replace(/^#\//, "").split("/").filter(Boolean);
    clear(this.mount);
    if (parts.length === 0) {
      this.mount.append(homeView(this.client, this.navigate));
    } else if (parts[0] === "register") {
      this.mount.append(
        registrationView(this.client, () => {
          /* stay on the page so the id banner can be read out */
        }),
      );
    } else if (parts[0] === "exam" && parts.length === 3) {
      try {
        const state = await reconstructExamState(this.client, parts[1], parts[2]);
        this.mount.append(
          examConsole(this.client, state, {
            onClosed: () => {
              /* the close dialog links to the timeline */
            },
          }),
        );
      } catch (err) {
        this.mount.append(h("p", { class: "load-error" }, String(err)));
      }
    } else if (parts[0] === "history" && parts.length === 2) {
      this.mount.append(historyView(this.client, parts[1]));
    } else {
      this.mount.append(h("p", { class: "load-error" }, `Unknown route ${hash}`));
    }
  }

  start(): void {
    window.addEventListener("hashchange", () => void this.render());
    void this.render();
  }
}
