/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_get_run_d_max_u: (a: number) => number;
export const __wbg_get_scalars_dbar: (a: number) => number;
export const __wbg_get_scalars_lambda_star: (a: number) => number;
export const __wbg_get_scalars_r1: (a: number) => number;
export const __wbg_get_scalars_r2: (a: number) => number;
export const __wbg_run_free: (a: number, b: number) => void;
export const __wbg_scalars_free: (a: number, b: number) => void;
export const __wbg_set_run_d_max_u: (a: number, b: number) => void;
export const __wbg_set_scalars_dbar: (a: number, b: number) => void;
export const __wbg_set_scalars_lambda_star: (a: number, b: number) => void;
export const __wbg_set_scalars_r1: (a: number, b: number) => void;
export const __wbg_set_scalars_r2: (a: number, b: number) => void;
export const rightmost_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
export const run: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number];
export const run_class: (a: number) => [number, number];
export const run_svg: (a: number) => [number, number];
export const scalars: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
export const scalars_case: (a: number) => [number, number];
export const scalars_region: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
