/* tslint:disable */
/* eslint-disable */

/**
 * `|nu|` on an `nx` by `ny` grid over `[x0, x1] x [-y1, -y0]`, row by row
 * from `y = -y0` downward. Conjugate poles come back as NaN.
 */
export function beltrami_heatmap(alphas: Float64Array, prevertices: Float64Array, t: number, variant: string, scale: number, x0: number, x1: number, y0: number, y1: number, nx: number, ny: number): Float64Array;

/**
 * Image polygon and critical radius:
 * `{"points", "vertices", "r0", "quad"}`.
 */
export function polygon_image(alphas: Float64Array, prevertices: Float64Array, samples_per_edge: number): string;

/**
 * Boundary trace of `w` with `S_w` on the chosen ray at parameter `t`:
 * `{"points", "simple", "indeterminate", "min_gap", "hp1", "hp4"}`.
 */
export function schwarz_trace(alphas: Float64Array, prevertices: Float64Array, t: number, variant: string, samples: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly beltrami_heatmap: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number, k: number, l: number, m: number, n: number) => [number, number, number, number];
    readonly polygon_image: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly schwarz_trace: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
