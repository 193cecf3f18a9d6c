/* tslint:disable */
/* eslint-disable */

/**
 * Bordered Monge-Ampere determinant at `(x, y)`; `p = 0` selects the parabolic phase,
 * otherwise the difference gauge of the planar `p`-ball.
 */
export function ma_determinant(p: number, x0: number, x1: number, y0: number, y1: number): number;

/**
 * Closed-form sharpness counts for `t = 2..=t_max`, as floats.
 */
export function sharpness_counts(d: number, t_max: bigint): Float64Array;

/**
 * Log-log slope of the sharpness counts against `q = t^(d+1)`.
 */
export function sharpness_slope(d: number, t_max: bigint): number;

/**
 * Shell count from the fiber counter, as a decimal string.
 */
export function shell_count(p: number, r: string, delta: string): string;

/**
 * Lattice points of the planar shell `R <= ||k||_p <= R + delta`, flattened as x0,y0,x1,y1,...
 */
export function shell_points(p: number, r: string, delta: string): Int32Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly ma_determinant: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly sharpness_counts: (a: number, b: bigint) => [number, number, number, number];
    readonly sharpness_slope: (a: number, b: bigint) => [number, number, number];
    readonly shell_count: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly shell_points: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
