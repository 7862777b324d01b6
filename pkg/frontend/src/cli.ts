#!/usr/bin/env node
/**
 * idphase-plot: render a phase-diagram heatmap (PNG + SVG) from the
 * idphase CSV outputs.
 *
 *   idphase-plot --phase phase_diagram.csv --theory theory_curve.csv \
 *                --out fig.png [--no-overlay] [--title "..."]
 *
 * Both formats are always written, derived from --out by extension swap.
 * Exit codes: 0 ok, 1 usage, 2 schema/data errors.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { SchemaMismatchError } from "./csv.js";
import { buildModel, renderSvg } from "./render.js";
import { encodePng, rasterize } from "./png.js";

interface Args {
  phase?: string;
  theory?: string;
  out?: string;
  title?: string;
  noOverlay: boolean;
}

function parseArgs(argv: string[]): Args {
  const args: Args = { noOverlay: false };
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new UsageError(`${a} needs a value`);
      return argv[++i];
    };
    switch (a) {
      case "--phase": args.phase = next(); break;
      case "--theory": args.theory = next(); break;
      case "--out": args.out = next(); break;
      case "--title": args.title = next(); break;
      case "--no-overlay": args.noOverlay = true; break;
      case "--help":
      case "-h":
        console.log("usage: idphase-plot --phase phase_diagram.csv " +
          "[--theory theory_curve.csv | --no-overlay] --out fig.png [--title ...]");
        process.exit(0);
        break;
      default:
        throw new UsageError(`unknown flag: ${a}`);
    }
  }
  return args;
}

class UsageError extends Error {}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
    if (!args.phase || !args.out) {
      throw new UsageError("--phase and --out are required");
    }
    if (!args.theory && !args.noOverlay) {
      throw new UsageError("either --theory or --no-overlay must be given");
    }
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`usage error: ${err.message}`);
      return 1;
    }
    throw err;
  }

  try {
    const model = buildModel({
      phaseCsv: readFileSync(args.phase, "utf8"),
      phasePath: args.phase,
      theoryCsv: args.noOverlay ? undefined : readFileSync(args.theory!, "utf8"),
      theoryPath: args.theory,
      title: args.title,
    });
    const base = args.out.replace(/\.(png|svg)$/i, "");
    const svgPath = `${base}.svg`;
    const pngPath = `${base}.png`;
    writeFileSync(svgPath, renderSvg(model), "utf8");
    writeFileSync(pngPath, encodePng(rasterize(model)));
    console.error(`wrote ${pngPath} and ${svgPath}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaMismatchError) {
      console.error(err.message);
      return 2;
    }
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
}

if (process.argv[1] && /cli\.(js|ts)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
