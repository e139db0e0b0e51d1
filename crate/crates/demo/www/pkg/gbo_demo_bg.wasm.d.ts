/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const evolve_bump: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const lp_energies: (a: number, b: bigint, c: number) => [number, number, number, number];
export const scaling_ratio: (a: number, b: bigint, c: number, d: number, e: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
