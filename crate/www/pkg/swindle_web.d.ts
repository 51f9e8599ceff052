/* tslint:disable */
/* eslint-disable */

/**
 * Balls of levels `0..=max_level` with their x₁-ranges and map chains.
 */
export function ball_layout(max_level: number): string;

/**
 * Values of a named function (`seed`, `u:n:k`, `v1-`, `residual:N`, ...) for
 * the default planar seed at the points `(i/grid, j/grid)`, row by row in x₂.
 */
export function heatmap(func: string, grid: number): Float64Array;

/**
 * Builds the planar certificate, optionally applies one seeded random
 * tampering, and verifies it on a stratified plan.
 */
export function verify_demo(samples: number, tamper_seed?: number | null): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly ball_layout: (a: number) => [number, number, number, number];
    readonly heatmap: (a: number, b: number, c: number) => [number, number, number, number];
    readonly verify_demo: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
