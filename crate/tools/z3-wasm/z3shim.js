#!/usr/bin/env node
// One-shot z3 stand-in: reads SMT-LIB2 from stdin (or from file arguments),
// evaluates it with the WebAssembly build of Z3, prints the output, exits.
// Flags that the native z3 binary accepts (-in, -smt2) are ignored.

'use strict';

const fs = require('fs');

async function main() {
  const files = process.argv.slice(2).filter((a) => !a.startsWith('-'));
  let input = '';
  if (files.length > 0) {
    input = files.map((f) => fs.readFileSync(f, 'utf8')).join('\n');
  } else {
    input = fs.readFileSync(0, 'utf8');
  }

  const { init } = require('z3-solver');
  const { Z3, em } = await init();
  const cfg = Z3.mk_config();
  const ctx = Z3.mk_context(cfg);
  let out;
  try {
    out = await Z3.eval_smtlib2_string(ctx, input);
  } catch (e) {
    process.stderr.write(String(e && e.message ? e.message : e) + '\n');
    process.exitCode = 1;
    out = '';
  }
  if (out) process.stdout.write(out.endsWith('\n') ? out : out + '\n');
  try {
    em.PThread.terminateAllThreads();
  } catch (_) {
    // older z3-solver builds have no worker pool to stop
  }
  process.exit(process.exitCode || 0);
}

main().catch((e) => {
  process.stderr.write(String(e && e.stack ? e.stack : e) + '\n');
  process.exit(1);
});
