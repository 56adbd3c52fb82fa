/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const __wbg_solution_free: (a: number, b: number) => void;
export const demo_new: (a: number, b: number, c: number) => [number, number, number];
export const demo_nodeKinds: (a: number) => [number, number];
export const demo_nx: (a: number) => number;
export const demo_ny: (a: number) => number;
export const demo_solveEpsilon: (a: number, b: number) => [number, number, number];
export const demo_solveLimit: (a: number) => [number, number, number];
export const demo_species: (a: number) => number;
export const rateStudy1d: (a: number, b: number) => [number, number, number, number];
export const solution_classS: (a: number) => number;
export const solution_converged: (a: number) => number;
export const solution_energy: (a: number) => number;
export const solution_iterations: (a: number) => number;
export const solution_overlap: (a: number) => number;
export const solution_values: (a: number) => [number, number];
export const __externref_table_alloc: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
