import { describe, expect, it } from "vitest";
import { ApiClient, ApiError, type SessionView } from "../src/api.js";
import { baseUrl, uniqueLearner } from "./helpers.js";

const ALL_OBJECTIVES = [
  "spreadsheet-basics",
  "data-cleaning",
  "formulas",
  "visualization",
  "dashboards",
];

function client(): ApiClient {
  return new ApiClient(baseUrl());
}

async function expectApiError(work: Promise<unknown>): Promise<ApiError> {
  try {
    await work;
  } catch (error) {
    expect(error).toBeInstanceOf(ApiError);
    return error as ApiError;
  }
  throw new Error("expected the call to reject");
}

describe("session lifecycle", () => {
  it("reports healthy", async () => {
    const health = await client().health();
    expect(health.status).toBe("ok");
  });

  it("creates a session with the documented initial state", async () => {
    const view = await client().createSession({
      learner_id: uniqueLearner("api"),
      objectives: ALL_OBJECTIVES,
    });
    expect(view.session_id).toBeTruthy();
    expect(view.status).toBe("active");
    expect(view.next_sequence).toBe(1);
    expect(view.reward_weights).toEqual({ beta: 0.6, gamma: 0.4 });
    expect(view.events.map((event) => event.kind)).toEqual(["created", "pathway_selected"]);
    expect(Object.values(view.mastery).every((value) => value === 0)).toBe(true);
    expect(view.pathway).not.toBeNull();
    expect(view.pathway!.items.length).toBeGreaterThan(0);
  });

  it("round-trips the view through GET", async () => {
    const api = client();
    const created = await api.createSession({
      learner_id: uniqueLearner("api"),
      objectives: ["data-cleaning"],
    });
    const fetched = await api.getSession(created.session_id);
    expect(fetched).toEqual(created);
  });

  it("rejects unknown objectives with a validation error", async () => {
    const error = await expectApiError(
      client().createSession({ learner_id: "x", objectives: ["no-such-skill"] }),
    );
    expect(error.status).toBe(400);
    expect(error.code).toBe("validation");
    expect(error.message).toContain("no-such-skill");
  });

  it("advances mastery on submit and conflicts on a stale sequence", async () => {
    const api = client();
    const created = await api.createSession({
      learner_id: uniqueLearner("api"),
      objectives: ALL_OBJECTIVES,
    });
    const serving = await api.nextItem(created.session_id);
    expect(serving.next_item).not.toBeNull();
    const submitted = await api.submitAssessment(created.session_id, {
      sequence: serving.next_sequence,
      item_id: serving.next_item!.item_id,
      score: 1.0,
    });
    expect(submitted.next_sequence).toBe(serving.next_sequence + 1);
    const assessed = Object.keys(serving.next_item!.skills);
    expect(assessed.some((skill) => submitted.mastery[skill] > 0)).toBe(true);

    const conflict = await expectApiError(
      api.submitAssessment(created.session_id, {
        sequence: serving.next_sequence,
        item_id: serving.next_item!.item_id,
        score: 1.0,
      }),
    );
    expect(conflict.status).toBe(409);
    expect(conflict.code).toBe("conflict");
    expect(conflict.field).toBe("sequence");
    expect(conflict.message).toContain(`expected ${serving.next_sequence + 1}`);
  });

  it("treats an empty objective list as already completed", async () => {
    const api = client();
    const view = await api.createSession({ learner_id: uniqueLearner("api"), objectives: [] });
    expect(view.status).toBe("completed");
    expect(view.pathway).toBeNull();
    const gone = await expectApiError(api.nextItem(view.session_id));
    expect(gone.status).toBe(410);
  });
});

describe("what-if and adopt", () => {
  async function freshSession(): Promise<[ApiClient, SessionView]> {
    const api = client();
    const view = await api.createSession({
      learner_id: uniqueLearner("api"),
      objectives: ALL_OBJECTIVES,
    });
    return [api, view];
  }

  it("what-if preview mutates nothing", async () => {
    const [api, view] = await freshSession();
    const before = await api.getSession(view.session_id);
    const preview = await api.nextItem(view.session_id, { beta: 0.1, gamma: 1.9 });
    expect(preview.what_if).toBe(true);
    expect(preview.beta).toBe(0.1);
    expect(preview.gamma).toBe(1.9);
    const after = await api.getSession(view.session_id);
    expect(after.events).toEqual(before.events);
    expect(after.reward_weights).toEqual(before.reward_weights);
  });

  it("adopt appends exactly one pathway_selected and switches the weights", async () => {
    const [api, view] = await freshSession();
    const before = await api.getSession(view.session_id);
    const adopted = await api.nextItem(view.session_id, { beta: 0.2, gamma: 0.8, adopt: true });
    expect(adopted.what_if).toBe(false);
    const after = await api.getSession(view.session_id);
    expect(after.events.length).toBe(before.events.length + 1);
    const appended = after.events[after.events.length - 1];
    expect(appended.kind).toBe("pathway_selected");
    expect(after.reward_weights).toEqual({ beta: 0.2, gamma: 0.8 });
  });
});
