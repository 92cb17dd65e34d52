/* tslint:disable */
/* eslint-disable */

/**
 * Flat `[D0, R0, D1, R1, ...]` samples of the bound from `D = 0` to `D = p`.
 */
export function boundCurve(p: number, samples: number): Float64Array;

/**
 * `[D, R]` where the time-sharing chord meets the curve.
 */
export function boundary(p: number): Float64Array;

/**
 * Builds a small regular compound code and runs `trials` encode/decode
 * trials at crossover `p`; returns the experiment result as JSON.
 */
export function simulate(p: number, n: number, trials: number, seed: number): string;

/**
 * JSON array of `{name, holds, detail}` for the ten-bit example.
 */
export function verifyExample(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly boundCurve: (a: number, b: number) => [number, number, number, number];
    readonly boundary: (a: number) => [number, number, number, number];
    readonly simulate: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly verifyExample: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
