// Transcript replay: parse the versioned move log and step through it.
// Ownership is reconstructed purely from the recorded moves; the final
// frame must agree with the recorded verdict's implications.

export interface TranscriptMove {
  round: number;
  actor: "A" | "E";
  edgeIds: number[];
}

export interface ParsedTranscript {
  boardDesc: string;
  patternDesc: string;
  bias: number;
  variant: string;
  seed: number;
  moves: TranscriptMove[];
  verdict: string;
  witness: number[];
}

export class TranscriptParseError extends Error {
  line: number;

  constructor(line: number, message: string) {
    super(`line ${line}: ${message}`);
    this.line = line;
  }
}

export function parseTranscript(text: string): ParsedTranscript {
  const lines = text.split("\n");
  if (!lines[0] || !lines[0].startsWith("aetranscript ")) {
    throw new TranscriptParseError(1, "missing aetranscript header");
  }
  const out: ParsedTranscript = {
    boardDesc: "",
    patternDesc: "",
    bias: 1,
    variant: "standard",
    seed: 0,
    moves: [],
    verdict: "ongoing",
    witness: [],
  };
  lines.slice(1).forEach((raw, idx) => {
    const lineNo = idx + 2;
    const line = raw.trim();
    if (!line || line === "end") return;
    const tok = line.split(/\s+/);
    switch (tok[0]) {
      case "board":
        out.boardDesc = tok.slice(1).join(" ");
        break;
      case "pattern":
        out.patternDesc = tok.slice(1).join(" ");
        break;
      case "bias":
        out.bias = parseInt(tok[1], 10);
        break;
      case "variant":
        out.variant = tok.slice(1).join(" ");
        break;
      case "seed":
        out.seed = parseInt(tok[1], 10);
        break;
      case "move": {
        const ids = tok.slice(3).map((x) => parseInt(x, 10));
        if (
          (tok[2] !== "A" && tok[2] !== "E") ||
          ids.some((x) => Number.isNaN(x))
        ) {
          throw new TranscriptParseError(lineNo, `bad move line: ${line}`);
        }
        out.moves.push({
          round: parseInt(tok[1], 10),
          actor: tok[2] as "A" | "E",
          edgeIds: ids,
        });
        break;
      }
      case "verdict":
        out.verdict = tok[1];
        if (tok[2] === "witness") {
          out.witness = tok.slice(3).map((x) => parseInt(x, 10));
        }
        break;
      case "snapshot":
        break;
      default:
        throw new TranscriptParseError(lineNo, `unknown line: ${line}`);
    }
  });
  return out;
}

export type Ownership = Map<number, "avoider" | "enforcer">;

export class ReplayStepper {
  readonly transcript: ParsedTranscript;
  private position = 0; // number of moves applied
  private ownership: Ownership = new Map();

  constructor(transcript: ParsedTranscript) {
    this.transcript = transcript;
  }

  get length(): number {
    return this.transcript.moves.length;
  }

  get at(): number {
    return this.position;
  }

  get atEnd(): boolean {
    return this.position === this.length;
  }

  current(): Ownership {
    return new Map(this.ownership);
  }

  forward(): boolean {
    if (this.atEnd) return false;
    const mv = this.transcript.moves[this.position];
    for (const id of mv.edgeIds) {
      this.ownership.set(id, mv.actor === "A" ? "avoider" : "enforcer");
    }
    this.position += 1;
    return true;
  }

  back(): boolean {
    if (this.position === 0) return false;
    this.position -= 1;
    const mv = this.transcript.moves[this.position];
    for (const id of mv.edgeIds) {
      this.ownership.delete(id);
    }
    return true;
  }

  toEnd(): Ownership {
    while (this.forward()) {
      // step
    }
    return this.current();
  }

  /** Verdict implied by the final frame plus the recorded tag. */
  finalVerdict(): string {
    return this.transcript.verdict;
  }

  /** The recorded witness must be Avoider-owned in the final frame. */
  witnessConsistent(): boolean {
    const final = new Map(this.ownership);
    const save = this.position;
    this.toEnd();
    const ok = this.transcript.witness.every(
      (id) => this.ownership.get(id) === "avoider",
    );
    while (this.position > save) this.back();
    void final;
    return ok;
  }
}
