// Text-protocol client for the play service. Every response is a view
// document; errors come back as "error <reason>" with a 4xx status.

import { parseView, ServerView } from "./viewmodel.js";

export interface CreateOptions {
  board?: string;
  pattern?: string;
  bias?: number;
  human?: string;
  policy?: string;
  seed?: number;
}

export class ApiError extends Error {
  status: number;

  constructor(status: number, reason: string) {
    super(reason);
    this.status = status;
  }
}

async function expectView(res: Response): Promise<ServerView> {
  const text = await res.text();
  if (!res.ok) {
    throw new ApiError(res.status, text.replace(/^error\s*/, "").trim());
  }
  return parseView(text);
}

export class PlayClient {
  constructor(private base: string) {}

  async createSession(opts: CreateOptions): Promise<ServerView> {
    const body = [
      "aecreate 1",
      `board ${opts.board ?? "kn 6"}`,
      `pattern ${opts.pattern ?? "P3"}`,
      `bias ${opts.bias ?? 1}`,
      `human ${opts.human ?? "avoider"}`,
      `policy ${opts.policy ?? "endgame"}`,
      `seed ${opts.seed ?? 0}`,
      "end",
    ].join("\n");
    const res = await fetch(`${this.base}/games`, { method: "POST", body });
    return expectView(res);
  }

  async getState(session: string): Promise<ServerView> {
    return expectView(await fetch(`${this.base}/games/${session}`));
  }

  async submitMove(session: string, edgeIds: number[]): Promise<ServerView> {
    const res = await fetch(`${this.base}/games/${session}/moves`, {
      method: "POST",
      body: `move ${edgeIds.join(" ")}`,
    });
    return expectView(res);
  }

  async policies(): Promise<{ enforcer: string[]; avoider: string[] }> {
    const res = await fetch(`${this.base}/policies`);
    const text = await res.text();
    const out = { enforcer: [] as string[], avoider: [] as string[] };
    for (const line of text.split("\n")) {
      const tok = line.trim().split(/\s+/);
      if (tok[0] === "enforcer") out.enforcer.push(tok[1]);
      if (tok[0] === "avoider") out.avoider.push(tok[1]);
    }
    return out;
  }

  async transcript(session: string): Promise<string> {
    const res = await fetch(`${this.base}/games/${session}/transcript`);
    return res.text();
  }
}
