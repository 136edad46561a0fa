/* tslint:disable */
/* eslint-disable */

export class Run {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    d_max_u: number;
    readonly class: string;
    readonly svg: string;
}

export class Scalars {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    dbar: number;
    lambda_star: number;
    r1: number;
    r2: number;
    readonly case: string;
    readonly region: string;
}

/**
 * Rightmost root at `steps` + 1 equally spaced delays in [0, τ_max],
 * flattened as (τ, Re μ, Im μ) triples.
 */
export function rightmost_curve(m: string, bc: string, n: number, lambda: number, d: number, tau_max: number, steps: number): Float64Array;

/**
 * Simulates from the default history and returns the space-time heatmap.
 */
export function run(m: string, bc: string, n: number, lambda: number, d: number, tau: number, t_end: number, dt: number): Run;

/**
 * λ*, r₁, r₂ and D̄ at the given normalization ("unit-l2" or "raw").
 */
export function scalars(m: string, bc: string, n: number, d: number, normalization: string): Scalars;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_get_run_d_max_u: (a: number) => number;
    readonly __wbg_get_scalars_dbar: (a: number) => number;
    readonly __wbg_get_scalars_lambda_star: (a: number) => number;
    readonly __wbg_get_scalars_r1: (a: number) => number;
    readonly __wbg_get_scalars_r2: (a: number) => number;
    readonly __wbg_run_free: (a: number, b: number) => void;
    readonly __wbg_scalars_free: (a: number, b: number) => void;
    readonly __wbg_set_run_d_max_u: (a: number, b: number) => void;
    readonly __wbg_set_scalars_dbar: (a: number, b: number) => void;
    readonly __wbg_set_scalars_lambda_star: (a: number, b: number) => void;
    readonly __wbg_set_scalars_r1: (a: number, b: number) => void;
    readonly __wbg_set_scalars_r2: (a: number, b: number) => void;
    readonly rightmost_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
    readonly run: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number];
    readonly run_class: (a: number) => [number, number];
    readonly run_svg: (a: number) => [number, number];
    readonly scalars: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly scalars_case: (a: number) => [number, number];
    readonly scalars_region: (a: number) => [number, number];
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
