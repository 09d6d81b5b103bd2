import { describe, expect, it } from "vitest";

import { SessionController } from "../src/controller.js";
import { summaryRows } from "../src/state.js";
import { CALM, StubService } from "./stub.js";
import type { SessionApi } from "../src/api.js";

const TOPICS = [
  { id: "greeting", utterance: "Good morning." },
  { id: "salary", utterance: "Salary expectations?" },
  { id: "closing", utterance: "Any questions?" },
];

describe("session lifecycle against the stub service", () => {
  it("runs a full interview and shows each topic once in the summary", async () => {
    const stub = new StubService(TOPICS);
    const controller = new SessionController(stub);
    await controller.start();
    expect(controller.view.transcript[0].text).toBe("Good morning.");
    while (!controller.view.done) {
      const ok = await controller.submit("answer", CALM);
      expect(ok).toBe(true);
    }
    const rows = summaryRows(controller.view);
    expect(rows.map((r) => r.topicId)).toEqual(["greeting", "salary", "closing"]);
  });

  it("bars follow the payload through every turn", async () => {
    const stub = new StubService(TOPICS, [0.25, -0.5, 0.75]);
    const controller = new SessionController(stub);
    await controller.start();
    const seen: number[] = [];
    controller.onChange((view) => {
      if (!view.inFlight) {
        seen.push(view.bars.valence);
      }
    });
    await controller.submit("a", CALM);
    await controller.submit("b", CALM);
    await controller.submit("c", CALM);
    expect(seen).toEqual([0.25, -0.5, 0.75]);
  });

  it("prevents double submits while a turn is in flight", async () => {
    let release: () => void = () => {};
    const gate = new Promise<void>((resolve) => {
      release = resolve;
    });
    const stub = new StubService(TOPICS, [], () => gate);
    const controller = new SessionController(stub);
    const started = controller.start();
    release();
    await started;

    let releaseTurn: () => void = () => {};
    const slowStub = new StubService(TOPICS, [], () =>
      new Promise<void>((resolve) => {
        releaseTurn = resolve;
      }),
    );
    const slow = new SessionController(slowStub);
    const starting = slow.start();
    releaseTurn();
    await starting;
    const first = slow.submit("one", CALM);
    const second = await slow.submit("two", CALM);
    expect(second).toBe(false);
    releaseTurn();
    expect(await first).toBe(true);
    expect(slowStub.turnsSeen.map((t) => t.answerText)).toEqual(["one"]);
  });

  it("surfaces service failures as an error banner state", async () => {
    const failing: SessionApi = {
      async createSession() {
        throw new Error("service unreachable");
      },
      async postTurn() {
        throw new Error("boom");
      },
    };
    const controller = new SessionController(failing);
    await controller.start();
    expect(controller.view.error).toContain("unreachable");
    expect(controller.view.sessionId).toBeNull();
  });

  it("keeps the answer text in the transcript it sent", async () => {
    const stub = new StubService(TOPICS);
    const controller = new SessionController(stub);
    await controller.start();
    await controller.submit("my exact words", CALM);
    const texts = controller.view.transcript.map((l) => l.text);
    expect(texts).toContain("my exact words");
    expect(stub.turnsSeen[0].answerText).toBe("my exact words");
  });
});
