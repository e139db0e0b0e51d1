/* tslint:disable */
/* eslint-disable */

export function evolve_bump(n: number, k: number, amp: number, horizon: number, frames: number): Float64Array;

/**
 * Flat array: `n` positions, `n` samples, then `(j, energy)` pairs.
 */
export function lp_energies(n: number, seed: bigint, s: number): Float64Array;

/**
 * `[measured, predicted]`.
 */
export function scaling_ratio(n: number, seed: bigint, k: number, s: number, lambda: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly evolve_bump: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly lp_energies: (a: number, b: bigint, c: number) => [number, number, number, number];
    readonly scaling_ratio: (a: number, b: bigint, c: number, d: number, e: number) => [number, number, number, number];
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
