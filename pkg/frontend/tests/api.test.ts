import { describe, expect, it } from "vitest";

import { ApiError, ExplorationApi } from "../src/api.js";

interface Call {
  url: string;
  init?: RequestInit;
}

function stubFetch(status: number, body: unknown) {
  const calls: Call[] = [];
  const impl = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url, init });
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { calls, impl };
}

describe("ExplorationApi", () => {
  it("drill posts the node id to the session endpoint", async () => {
    const { calls, impl } = stubFetch(200, { kind: "nodes", elements: [] });
    const api = new ExplorationApi("http://svc", impl);
    await api.drill("s1", 42);
    expect(calls).toHaveLength(1);
    expect(calls[0].url).toBe("http://svc/sessions/s1/drill");
    expect(JSON.parse(calls[0].init!.body as string)).toEqual({ node_id: 42 });
  });

  it("createSession passes the request through untouched", async () => {
    const { calls, impl } = stubFetch(200, { session_id: "s9", view: {} });
    const api = new ExplorationApi("", impl);
    const request = {
      dataset_id: "d1", scenario: "RAN" as const, range: [30, 50] as [number, number],
      incremental: true,
    };
    const response = await api.createSession(request);
    expect(response.session_id).toBe("s9");
    expect(JSON.parse(calls[0].init!.body as string)).toEqual(request);
  });

  it("adapt returns view and report together", async () => {
    const { impl } = stubFetch(200, {
      view: { kind: "nodes" },
      adaptation_report: { case: { kind: "degree_power", k: 2 } },
    });
    const api = new ExplorationApi("", impl);
    const response = await api.adapt("s1", { degree: 4 });
    expect(response.adaptation_report.case.kind).toBe("degree_power");
  });

  it("non-2xx answers raise ApiError with the server detail", async () => {
    const { impl } = stubFetch(409, { detail: "session is busy" });
    const api = new ExplorationApi("", impl);
    await expect(api.rollup("s1")).rejects.toThrowError(ApiError);
    await expect(api.rollup("s1")).rejects.toMatchObject({ status: 409 });
  });

  it("uploadDataset sends multipart form data", async () => {
    const { calls, impl } = stubFetch(200, { dataset_id: "d1", size: 10 });
    const api = new ExplorationApi("", impl);
    await api.uploadDataset("ages.csv", "subject,age\nurn:a,1\n", "csv");
    const form = calls[0].init!.body as FormData;
    expect(form.get("format")).toBe("csv");
    expect(form.get("file")).toBeInstanceOf(Blob);
  });
});
