// DOM rendering. Values land in the page exactly as the view-state holds
// them; bars use barRatio only to compute widths.

import { barRatio, summaryRows, SLIDER_KEYS, SLIDER_LABELS, type ViewState } from "./state.js";

const BAR_FIELDS = [
  ["valence", "recruiter valence"],
  ["self_confidence", "self-confidence"],
  ["motivation", "motivation"],
  ["qualification", "qualification"],
] as const;

export function buildPage(root: HTMLElement): void {
  root.innerHTML = `
    <header>
      <h1>Interview room</h1>
      <span id="profile"></span>
    </header>
    <div id="error" class="banner hidden">
      <span id="error-text"></span>
      <button id="retry">retry</button>
    </div>
    <main>
      <section id="bars" class="bars"></section>
      <section id="transcript" class="transcript"></section>
      <section id="summary" class="summary hidden">
        <h2>Interview summary</h2>
        <table id="summary-table">
          <thead>
            <tr><th>topic</th><th>self-confidence</th><th>motivation</th><th>qualification</th></tr>
          </thead>
          <tbody></tbody>
        </table>
      </section>
      <section id="controls">
        <div id="sliders" class="sliders"></div>
        <form id="answer-form">
          <input id="answer" type="text" placeholder="Type your answer" autocomplete="off" />
          <button id="send" type="submit">Send</button>
        </form>
      </section>
      <section id="debug" class="debug hidden">
        <h2>Reasoning trace</h2>
        <pre id="trace"></pre>
      </section>
    </main>
    <footer>
      <label><input type="checkbox" id="debug-toggle" /> show reasoning trace</label>
    </footer>
  `;
  const bars = root.querySelector("#bars") as HTMLElement;
  for (const [field, label] of BAR_FIELDS) {
    const row = document.createElement("div");
    row.className = "bar-row";
    row.innerHTML = `
      <span class="bar-label">${label}</span>
      <div class="bar-track"><div class="bar-fill" id="bar-${field}"></div></div>
      <span class="bar-value" id="value-${field}"></span>
    `;
    bars.appendChild(row);
  }
  const sliders = root.querySelector("#sliders") as HTMLElement;
  for (const key of SLIDER_KEYS) {
    const row = document.createElement("label");
    row.className = "slider-row";
    row.innerHTML = `
      <span class="slider-label">${SLIDER_LABELS[key]}</span>
      <input type="range" min="0" max="1" step="0.01" value="0" data-channel="${key}" />
      <span class="slider-value" data-value-for="${key}">0.00</span>
    `;
    sliders.appendChild(row);
  }
}

export function render(root: HTMLElement, view: ViewState): void {
  const profile = root.querySelector("#profile") as HTMLElement;
  profile.textContent = view.profileId ? `profile ${view.profileId}` : "";

  const banner = root.querySelector("#error") as HTMLElement;
  banner.classList.toggle("hidden", view.error === null);
  (root.querySelector("#error-text") as HTMLElement).textContent = view.error ?? "";

  for (const [field] of BAR_FIELDS) {
    const value = view.bars[field];
    const fill = root.querySelector(`#bar-${field}`) as HTMLElement;
    fill.style.width = `${barRatio(value) * 100}%`;
    (root.querySelector(`#value-${field}`) as HTMLElement).textContent = value.toFixed(2);
  }

  const transcript = root.querySelector("#transcript") as HTMLElement;
  transcript.innerHTML = "";
  for (const line of view.transcript) {
    const p = document.createElement("p");
    p.className = line.speaker;
    p.textContent = `${line.speaker === "recruiter" ? "R" : "you"}: ${line.text}`;
    transcript.appendChild(p);
  }
  transcript.scrollTop = transcript.scrollHeight;

  const send = root.querySelector("#send") as HTMLButtonElement;
  const answer = root.querySelector("#answer") as HTMLInputElement;
  send.disabled = view.inFlight || view.done || view.sessionId === null;
  answer.disabled = send.disabled;

  const summary = root.querySelector("#summary") as HTMLElement;
  summary.classList.toggle("hidden", !view.done);
  if (view.done) {
    const body = summary.querySelector("tbody") as HTMLElement;
    body.innerHTML = "";
    for (const row of summaryRows(view)) {
      const tr = document.createElement("tr");
      tr.innerHTML = `
        <td>${row.topicId}</td>
        <td>${row.assessment.self_confidence.toFixed(2)}</td>
        <td>${row.assessment.motivation.toFixed(2)}</td>
        <td>${row.assessment.qualification.toFixed(2)}</td>
      `;
      body.appendChild(tr);
    }
  }
}
