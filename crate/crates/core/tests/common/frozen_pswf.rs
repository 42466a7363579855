// Generated by tests/oracles/pswf_quadrature.py; do not edit.
// (c, l, re, im) eigenvalues of the 200-point Nystrom discretization.
pub const FROZEN_PSWF_EIGENVALUES: &[(f64, usize, f64, f64)] = &[
    (0.1, 0, 1.9988897156243607871, 0.0),
    (0.1, 1, 0.0, 6.6626681439299598114e-2),
    (0.1, 2, -8.8883828559361332119e-4, 0.0),
    (0.1, 3, 0.0, -7.6189156950819347597e-6),
    (0.1, 4, 4.8374537809450858865e-8, 0.0),
    (0.1, 5, 0.0, 2.4431672163444317655e-10),
    (0.1, 6, -1.0251067994495799315e-12, 0.0),
    (1.0, 0, 1.8967439023923993267, 0.0),
    (1.0, 1, 0.0, 6.2811560333837408291e-1),
    (1.0, 2, -8.8177729243590821409e-2, 0.0),
    (1.0, 3, 0.0, -7.6033837078992707334e-3),
    (1.0, 4, 4.8332632960744907958e-4, 0.0),
    (1.0, 5, 0.0, 2.442057653514491484e-5),
    (1.0, 6, -1.0248314013737982663e-6, 0.0),
    (1.0, 7, 0.0, -3.6792394641872296225e-8),
    (1.0, 8, 1.1543353636261616064e-9, 0.0),
    (10.0, 0, 7.9266544204765266344e-1, 0.0),
    (10.0, 1, 0.0, 7.92664179649411446e-1),
    (10.0, 2, -7.9262294495426687843e-1, 0.0),
    (10.0, 3, 0.0, -7.9183321572336706263e-1),
    (10.0, 4, 7.8247676120924280372e-1, 0.0),
    (10.0, 5, 0.0, 7.2003801388457427226e-1),
    (10.0, 6, -5.2588446427319104516e-1, 0.0),
    (10.0, 7, 0.0, -2.6566099582509197438e-1),
    (10.0, 8, 9.6822632918841849751e-2, 0.0),
    (10.0, 9, 0.0, 2.8739878398235293547e-2),
    (10.0, 10, -7.4448729094687687697e-3, 0.0),
    (10.0, 11, 0.0, -1.7305623352501845555e-3),
    (10.0, 12, 3.6617050651534470923e-4, 0.0),
    (10.0, 13, 0.0, 7.1210818575274697075e-5),
    (10.0, 14, -1.2823109542409796768e-5, 0.0),
    (10.0, 15, 0.0, -2.1509573167570751397e-6),
    (10.0, 16, 3.3778509583625937122e-7, 0.0),
    (29.0, 0, 4.6546918514176366981e-1, 0.0),
    (29.0, 1, 0.0, 4.6546918514176366981e-1),
    (29.0, 2, -4.654691851417636698e-1, 0.0),
    (29.0, 3, 0.0, -4.6546918514176366882e-1),
    (29.0, 4, 4.6546918514176361821e-1, 0.0),
    (29.0, 5, 0.0, 4.6546918514176160316e-1),
    (29.0, 6, -4.6546918514169702777e-1, 0.0),
    (29.0, 7, 0.0, -4.6546918513998803679e-1),
    (29.0, 8, 4.6546918510196316164e-1, 0.0),
    (29.0, 9, 0.0, 4.6546918438172211532e-1),
    (29.0, 10, -4.6546917266903097522e-1, 0.0),
    (29.0, 11, 0.0, -4.6546900828897369825e-1),
    (29.0, 12, 4.6546701334371974379e-1, 0.0),
    (29.0, 13, 0.0, 4.6544611053060582867e-1),
    (29.0, 14, -4.6525836465934813254e-1, 0.0),
    (29.0, 15, 0.0, -4.6384026007181446137e-1),
    (29.0, 16, 4.5527918818468328023e-1, 0.0),
    (29.0, 17, 0.0, 4.185625517980214284e-1),
    (29.0, 18, -3.2433958508916042523e-1, 0.0),
    (29.0, 19, 0.0, -1.9387930856505295268e-1),
    (29.0, 20, 9.1275982120403287812e-2, 0.0),
    (29.0, 21, 0.0, 3.6788439135315680936e-2),
    (29.0, 22, -1.3466799801452614503e-2, 0.0),
    (29.0, 23, 0.0, -4.5951547235440134248e-3),
    (29.0, 24, 1.4784033019083616154e-3, 0.0),
    (29.0, 25, 0.0, 4.5137741561164163277e-4),
    (29.0, 26, -1.3136233095918855958e-4, 0.0),
    (29.0, 27, 0.0, -3.6565048736071237235e-5),
    (29.0, 28, 9.7616701439606582269e-6, 0.0),
    (29.0, 29, 0.0, 2.505230993433154923e-6),
    (29.0, 30, -6.1929352624154308005e-7, 0.0),
    (29.0, 31, 0.0, -1.4771346235242805698e-7),
    (29.0, 32, 3.4047211390770152501e-8, 0.0),
    (29.0, 33, 0.0, 7.5940648877859176339e-9),
    (29.0, 34, -1.6410970210746228136e-9, 0.0),
    (29.0, 35, 0.0, -3.4399272116167404449e-10),
    (29.0, 36, 7.0011011686385880665e-11, 0.0),
    (29.0, 37, 0.0, 1.3848336045154076457e-11),
    (29.0, 38, -2.6645545072164752416e-12, 0.0),
    (29.0, 39, 0.0, -4.9911704915533609903e-13),
    (29.0, 40, 9.1088274083331229976e-14, 0.0),
    (50.0, 0, 3.5449077018110320546e-1, 0.0),
    (50.0, 1, 0.0, 3.5449077018110320546e-1),
    (50.0, 2, -3.5449077018110320546e-1, 0.0),
    (50.0, 3, 0.0, -3.5449077018110320546e-1),
    (50.0, 4, 3.5449077018110320546e-1, 0.0),
    (50.0, 5, 0.0, 3.5449077018110320546e-1),
    (50.0, 6, -3.5449077018110320546e-1, 0.0),
    (50.0, 7, 0.0, -3.5449077018110320546e-1),
    (50.0, 8, 3.5449077018110320546e-1, 0.0),
    (50.0, 9, 0.0, 3.5449077018110320546e-1),
    (50.0, 10, -3.5449077018110320546e-1, 0.0),
    (50.0, 11, 0.0, -3.5449077018110320546e-1),
    (50.0, 12, 3.5449077018110320546e-1, 0.0),
    (50.0, 13, 0.0, 3.5449077018110320539e-1),
    (50.0, 14, -3.5449077018110320383e-1, 0.0),
    (50.0, 15, 0.0, -3.5449077018110317276e-1),
    (50.0, 16, 3.5449077018110260642e-1, 0.0),
    (50.0, 17, 0.0, 3.5449077018109314815e-1),
    (50.0, 18, -3.5449077018094816223e-1, 0.0),
    (50.0, 19, 0.0, -3.5449077017890533443e-1),
    (50.0, 20, 3.544907701524270778e-1, 0.0),
    (50.0, 21, 0.0, 3.5449076983663263588e-1),
    (50.0, 22, -3.5449076637241165469e-1, 0.0),
    (50.0, 23, 0.0, -3.5449073145838531816e-1),
    (50.0, 24, 3.5449040883518865746e-1, 0.0),
    (50.0, 25, 0.0, 3.5448768450151977073e-1),
    (50.0, 26, -3.5446677060799120361e-1, 0.0),
    (50.0, 27, 0.0, -3.543220820310718834e-1),
    (50.0, 28, 3.5343503501841055826e-1, 0.0),
    (50.0, 29, 0.0, 3.4879570129436933975e-1),
    (50.0, 30, -3.2979528122799109984e-1, 0.0),
    (50.0, 31, 0.0, -2.7699552351632556875e-1),
    (50.0, 32, 1.8941778450028310846e-1, 0.0),
    (50.0, 33, 0.0, 1.0378878444343229097e-1),
    (50.0, 34, -4.8399104963771451473e-2, 0.0),
    (50.0, 35, 0.0, -2.0464548852322494659e-2),
    (50.0, 36, 8.1138398963444615564e-3, 0.0),
    (50.0, 37, 0.0, 3.0606766640985018706e-3),
    (50.0, 38, -1.1062167882875230896e-3, 0.0),
    (50.0, 39, 0.0, -3.8473048614673093305e-4),
    (50.0, 40, 1.2914999659072829262e-4, 0.0),
    (50.0, 41, 0.0, 4.194543880953276619e-5),
    (50.0, 42, -1.3205847472859918716e-5, 0.0),
    (50.0, 43, 0.0, -4.0368408098277132975e-6),
    (50.0, 44, 1.1998092959417428397e-6, 0.0),
    (50.0, 45, 0.0, 3.4713753636369506411e-7),
    (50.0, 46, -9.787494835678964605e-8, 0.0),
    (50.0, 47, 0.0, -2.6917466459302576528e-8),
    (50.0, 48, 7.2270418803050674241e-9, 0.0),
    (50.0, 49, 0.0, 1.8957785949577851198e-9),
    (50.0, 50, -4.8620933616314689108e-10, 0.0),
    (50.0, 51, 0.0, -1.2199747991927315935e-10),
    (50.0, 52, 2.9966236727670863175e-11, 0.0),
    (50.0, 53, 0.0, 7.209590775656734629e-12),
    (50.0, 54, -1.699859469569851661e-12, 0.0),
    (50.0, 55, 0.0, -3.9296321145370665174e-13),
    (50.0, 56, 8.9110081812435029499e-14, 0.0),
    (50.0, 57, 0.0, 1.9830147180956337418e-14),
    (50.0, 58, -4.3323833390819402318e-15, 0.0),
    (50.0, 59, 0.0, -9.2960396974363330362e-16),
    (50.0, 60, 1.959742419535905403e-16, 0.0),
    (50.0, 61, 0.0, 4.060522682953805391e-17),
    (50.0, 62, -8.271640962655746589e-18, 0.0),
    (50.0, 63, 0.0, -1.6571678703347614512e-18),
    (50.0, 64, 3.2661692977509387366e-19, 0.0),
    (50.0, 65, 0.0, 6.3348292027814865882e-20),
    (50.0, 66, -1.2094186001603296276e-20, 0.0),
    (50.0, 67, 0.0, -2.2734245888389250917e-21),
    (50.0, 68, 4.2088049589387138873e-22, 0.0),
    (50.0, 69, 0.0, 7.6757238992186241629e-23),
    (50.0, 70, -1.3793237233538539502e-23, 0.0),
];
