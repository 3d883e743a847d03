// New-patient registration: on success the generated patient id is shown
// prominently so it can be handed to the family for follow-up visits.

import { GatewayClient, GatewayError } from "../api.js";
import { clear, h } from "../dom.js";

interface Field {
  key: string;
  label: string;
  type: "text" | "date" | "number";
  required: boolean;
}

const FIELDS: Field[] = [
  { key: "name", label: "Name", type: "text", required: true },
  { key: "date_of_birth", label: "Date of birth", type: "date", required: true },
  { key: "mother_name", label: "Mother's name", type: "text", required: true },
  { key: "father_name", label: "Father's name", type: "text", required: true },
  {
    key: "gestational_week_at_birth",
    label: "Gestational week at birth",
    type: "number",
    required: true,
  },
  { key: "birth_weight", label: "Birth weight (g)", type: "number", required: true },
  { key: "discharge_diagnosis", label: "Discharge diagnosis", type: "text", required: false },
];

export function registrationView(
  client: GatewayClient,
  onRegistered: (patientId: string) => void,
): HTMLElement {
  const banner = h("div", { class: "id-banner", role: "status" });
  const form = h("form", { class: "registration-form", novalidate: true });
  const inputs = new Map<string, HTMLInputElement>();
  const errors = new Map<string, HTMLElement>();

  for (const field of FIELDS) {
    const input = h("input", {
      name: field.key,
      type: field.type,
      "data-field": field.key,
    });
    const error = h("span", { class: "field-error", "data-error-for": field.key });
    inputs.set(field.key, input);
    errors.set(field.key, error);
    form.append(h("label", {}, `${field.label}${field.required ? " *" : ""}`, input, error));
  }

  const submit = h("button", { type: "submit" }, "Register patient") as HTMLButtonElement;
  form.append(submit);

  function clearErrors(): void {
    for (const el of errors.values()) el.textContent = "";
  }

  function localValidation(): Record<string, unknown> | null {
    clearErrors();
    let ok = true;
    const payload: Record<string, unknown> = {};
    for (const field of FIELDS) {
      const raw = inputs.get(field.key)!.value.trim();
      if (field.required && raw === "") {
        errors.get(field.key)!.textContent = "required";
        ok = false;
        continue;
      }
      payload[field.key] = field.type === "number" && raw !== "" ? Number(raw) : raw;
    }
    return ok ? payload : null;
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const payload = localValidation();
    if (!payload || submit.disabled) {
      return; // client-side mirror of the server rule: no request goes out
    }
    submit.disabled = true; // double submits create exactly one patient
    void (async () => {
      try {
        const patient = await client.registerPatient(payload);
        clear(banner);
        banner.append(
          h("strong", { class: "patient-id", "data-patient-id": patient.id },
            `Patient ID: ${patient.id}`),
          h("p", {}, "Deliver this identifier to the family; follow-up visits are looked up by it."),
        );
        form.reset();
        onRegistered(patient.id);
      } catch (err) {
        if (err instanceof GatewayError) {
          // mirror server-side field messages inline where possible
          const message = err.message;
          const target = FIELDS.find((f) => message.includes(f.key));
          (target ? errors.get(target.key)! : banner).textContent = message;
        } else {
          banner.textContent = String(err);
        }
      } finally {
        submit.disabled = false;
      }
    })();
  });

  return h("section", { class: "registration" }, h("h2", {}, "New patient registration"), banner, form);
}
