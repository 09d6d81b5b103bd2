import { HttpSessionApi } from "./api.js";
import { SessionController } from "./controller.js";
import { clampSlider, SLIDER_KEYS, type SliderKey } from "./state.js";
import { buildPage, render } from "./view.js";

const mount = document.getElementById("app");
if (!mount) {
  throw new Error("missing #app mount point");
}
const root: HTMLElement = mount;
buildPage(root);

const api = new HttpSessionApi("");
const controller = new SessionController(api);
controller.onChange((view) => render(root, view));

let trace: EventSource | null = null;

function readAffects() {
  const out = {} as Record<SliderKey, number>;
  for (const key of SLIDER_KEYS) {
    const input = root.querySelector(`input[data-channel="${key}"]`) as HTMLInputElement;
    out[key] = clampSlider(parseFloat(input.value));
  }
  return out;
}

for (const key of SLIDER_KEYS) {
  const input = root.querySelector(`input[data-channel="${key}"]`) as HTMLInputElement;
  const label = root.querySelector(`[data-value-for="${key}"]`) as HTMLElement;
  input.addEventListener("input", () => {
    label.textContent = clampSlider(parseFloat(input.value)).toFixed(2);
  });
}

const form = root.querySelector("#answer-form") as HTMLFormElement;
const answer = root.querySelector("#answer") as HTMLInputElement;
form.addEventListener("submit", (event) => {
  event.preventDefault();
  void controller.submit(answer.value, readAffects()).then((accepted) => {
    if (accepted) {
      answer.value = "";
    }
  });
});

const retry = root.querySelector("#retry") as HTMLButtonElement;
retry.addEventListener("click", () => {
  if (controller.view.sessionId === null) {
    void controller.start().then(attachTrace);
  }
});

const debugToggle = root.querySelector("#debug-toggle") as HTMLInputElement;
const debugPanel = root.querySelector("#debug") as HTMLElement;
debugToggle.addEventListener("change", () => {
  debugPanel.classList.toggle("hidden", !debugToggle.checked);
});

function attachTrace(): void {
  const sessionId = controller.view.sessionId;
  if (!sessionId || trace) {
    return;
  }
  trace = api.openTraceStream(sessionId);
  const pre = root.querySelector("#trace") as HTMLElement;
  for (const kind of ["session", "turn"]) {
    trace.addEventListener(kind, (event) => {
      pre.textContent += `${kind}: ${(event as MessageEvent).data}\n`;
    });
  }
}

void controller.start().then(attachTrace);
