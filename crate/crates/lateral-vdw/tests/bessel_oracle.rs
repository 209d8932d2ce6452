//! Cross-checks of the Bessel K implementation against an independent
//! high-precision reference and an independent integral-representation
//! oracle.

use lateral_vdw::special::bessel_k;


#[test]
fn matches_high_precision_reference_table() {
    // 100 log-spaced points over [1e-6, 60] plus extra points bracketing the
    // x = 2 branch seam; worst relative error must stay below 1e-12
    let mut worst: f64 = 0.0;
    for &(x, k0, k1, k2, k3) in BESSEL_K_REFERENCE.iter() {
        for (n, want) in [(0, k0), (1, k1), (2, k2), (3, k3)] {
            let got = bessel_k(n, x).unwrap();
            let rel = ((got - want) / want).abs();
            worst = worst.max(rel);
            assert!(rel <= 1e-12, "K_{n}({x}): rel error {rel:.3e}");
        }
    }
    // machine-level agreement in practice
    assert!(worst < 5e-14, "worst relative error {worst:.3e}");
}

/// Independent oracle: K_n(x) = int_0^inf exp(-x cosh t) cosh(n t) dt,
/// evaluated by composite Simpson on a truncated range. Shares no code or
/// method with the implementation under test.
fn bessel_k_integral(n: u32, x: f64) -> f64 {
    // integrand decays like exp(-x e^t / 2); stop when the envelope is dead
    let t_max = ((700.0 / x).ln() * 2.0).max(4.0).min(745.0_f64.ln() * 3.0);
    let steps = 40_000; // even
    let h = t_max / steps as f64;
    let f = |t: f64| (-x * t.cosh()).exp() * (n as f64 * t).cosh();
    let mut sum = f(0.0) + f(t_max);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(i as f64 * h);
    }
    sum * h / 3.0
}

#[test]
fn matches_integral_representation() {
    // the Simpson oracle is good to ~1e-12 relative for moderate x
    let mut x = 0.05;
    while x <= 30.0 {
        for n in 0..4 {
            let got = bessel_k(n, x).unwrap();
            let want = bessel_k_integral(n, x);
            let rel = ((got - want) / want).abs();
            assert!(rel < 5e-11, "K_{n}({x}): rel {rel:.3e}");
        }
        x *= 2.3;
    }
}

// (x, K0, K1, K2, K3) reference values, 40-digit arithmetic rounded to f64.0
const BESSEL_K_REFERENCE: [(f64, f64, f64, f64, f64); 105] = [
    (1e-06, 13.9314420736264194, 999999.999992784279, 1999999999999.50000, 7.99999999999900000e+18),
    (1.1983044837717344e-06, 13.7505344461513518, 834512.441147019085, 1392822028886.31505, 4.64930924568545432e+18),
    (1.4359336358274428e-06, 13.5696268186769370, 696411.014433306035, 969976602075.692028, 2.70200955775230501e+18),
    (1.7206857142106733e-06, 13.3887191912034473, 581163.655698837142, 675502389437.750481, 1.57030975234863814e+18),
    (2.061905406500619e-06, 13.2078115637312679, 484988.301023963937, 470427304287.137741, 912606956273086460.0),
    (2.470790493722872e-06, 13.0269039362609450, 404728.771014476841, 327610756200.331466, 530373994934637849.0),
    (2.9607593270886954e-06, 12.8459963087932509, 337751.194699368039, 228151739067.892826, 308234089790045389.0),
    (3.5478911770193738e-06, 12.6650886813292776, 281857.573984908433, 158887384051.146440, 179134450436982849.0),
    (4.2514539053564914e-06, 12.4841810538705765, 235213.652116217576, 110650924309.166412, 104106432079628204.0),
    (5.0945362773375345e-06, 12.3032734264193347, 196288.719011038615, 77058522447.0954911, 60502874650343795.5),
    (6.104805663871328e-06, 12.1223657989786486, 163805.378061886801, 53664403788.7400629, 35162071812755516.7),
    (7.3154159995720916e-06, 11.9414581715528971, 136697.625907479467, 37372481881.8653192, 20434918197024687.3),
    (8.766095792942721e-06, 11.7605505441482700, 114075.869480457617, 26026608019.4659041, 11876031763499103.7),
    (1.05044518938558e-05, 11.5796429167735162, 95197.7322984799245, 18125216493.2053814, 6901918034983652.08),
    (1.2587531803971892e-05, 11.3987352894409981, 79443.6919509355270, 12622600404.8877471, 4011143916603186.48),
    (1.5083695800318825e-05, 11.2178276621681795, 66296.7492785060867, 8790517952.72984997, 2331131062135062.22),
    (1.807486030937093e-05, 11.0369200349797230, 55325.4620505691965, 6121813524.79178469, 1354768649994583.72),
    (2.165918615226694e-05, 10.8560124079104502, 46169.7863579083574, 4263298366.88182611, 787342301259202.515),
    (2.5954299881108185e-05, 10.6751047810095068, 38529.2610787767341, 2969007940.40328892, 457574730083841.438),
    (3.110115392068807e-05, 10.4941971543462481, 32153.1476688255660, 2067649831.51500011, 265925802886641.733),
    (3.7268652193635445e-05, 10.3132895280184895, 26832.2016931216688, 1439934116.52730167, 154546411745279.746),
    (4.465919302776264e-05, 10.1323819021641810, 22391.8060672413348, 1002785978.67065539, 89816757620073.2346),
    (5.3515311246795344e-05, 9.95147427697777488, 18686.2406615257103, 698351200.523862024, 52198235196898.4478),
    (6.412763741747479e-05, 9.77056665273328986, 15593.9002145336726, 486339467.842799721, 30335717183946.7857),
    (7.684443545104807e-05, 9.58965902981672694, 13013.3036223158767, 338692162.012476789, 17630016293280.3436),
    (9.208303155389852e-05, 9.40875140877162646, 10859.7636406563434, 235868951.979345426, 10245924715946.6235),
    (0.0001103435095903307, 9.22784379036306891, 9062.60771015047954, 164261735.971844826, 5954559061305.72869),
    (0.00013222512229720264, 9.04693617566753425, 7562.85870014512530, 114393682.030593162, 3460573309918.22447),
    (0.00015844595691600388, 8.86602856619900553, 6311.29946068919633, 79665019.9970474820, 2011159433731.20842),
    (0.00018986650060795067, 8.68512096408584238, 5266.85766704223968, 55479597.2400036123, 1168812767125.50017),
    (0.000227517878996556, 8.50421337231872373, 4395.25795230516288, 38636602.4430281333, 679271499249.743407),
    (0.00027263569453980796, 8.32330579509799920, 3667.89709531175364, 26906955.3502014117, 394767906610.593918),
    (0.00032670057520327284, 8.14239823832002501, 3060.90535090767160, 18738299.9192228044, 229424758833.849417),
    (0.00039148676411688654, 7.96149071025762779, 2554.36311836439963, 13049558.3038963668, 133333330778.968423),
    (0.0004691203447785525, 7.78058322251153882, 2131.64724139593755, 9087855.98466048623, 77488485296.4555718),
    (0.0005621490125766814, 7.59967579133973322, 1778.88548735687148, 6328882.85359867526, 45033490850.3289243),
    (0.0006736256823184911, 7.41876843951334576, 1484.50130330890667, 4407503.57657387343, 26171827721.3163064),
    (0.0008072086755060417, 7.23786119890565248, 1238.83390925263942, 3069433.88513059423, 15210114699.0558590),
    (0.0009672817751983328, 7.05695411410053723, 1033.82126115594433, 2137587.41391673378, 8839565548.42587007),
    (0.001159098088290845, 6.87604724741732783, 862.735479604466636, 1488639.26759336477, 5137233967.10008667),
    (0.001388952436330165, 6.69514068590111262, 719.962061660806568, 1036704.63069139742, 2985573453.98753267),
    (0.0016643879322001114, 6.51423455103728290, 600.815630350237106, 721972.371744746331, 1735106600.50979951),
    (0.001994443521890961, 6.33332901223704087, 501.386175244449770, 502789.360014148172, 1008380742.78292584),
    (0.0023899506149114274, 6.15242430553553164, 418.410738240244544, 350147.896466787373, 586034111.796932339),
    (0.0028638885378413775, 5.97152075948456216, 349.166333664736284, 243846.699992626847, 340581620.777446638),
    (0.0034318104759177986, 5.79061883095934358, 291.380588685889694, 169817.375920879597, 197933571.335932228),
    (0.004112353880747108, 5.60971915460241434, 243.157171535405477, 118262.539247422791, 115031724.082093839),
    (0.004927852094155352, 5.42882261099009267, 202.913560344275583, 82359.1831428512162, 66852195.6838245392),
    (0.005905067259790294, 5.24793042044909684, 169.329110375558350, 57355.6904998321702, 38852015.0246793277),
    (0.007076068574380379, 5.06704427193329987, 141.301715404569997, 39942.9828287987057, 22579336.1803045181),
    (0.008479284700156272, 4.88616649970091895, 117.911641034827500, 27816.5814225050583, 13122253.7550064087),
    (0.010160764875374328, 4.70530032497881284, 98.3913431044773965, 19371.6219274263626, 7626147.08552182958),
    (0.012175690108711404, 4.52445018570358124, 82.1002807567224679, 13490.4591321109203, 4432014.58596674892),
    (0.014590184050284031, 4.34362218521515736, 68.5038976649293266, 9394.75260247436277, 2575704.99212729014),
    (0.0174834829665102, 4.16282470096970949, 57.1560816980438855, 6542.45748915964489, 1496888.76605135745),
    (0.020950536030715915, 3.98206920755675375, 47.6845274739482660, 4556.08779137497240, 869922.858068660565),
    (0.025105121263028152, 3.80137138526166504, 39.7785215239370818, 3172.75810393195326, 505555.457285348984),
    (0.030083579375119743, 3.62075260687361370, 33.1787493071119835, 2209.39213994066030, 293800.368137403808),
    (0.03604928805310893, 3.44024192213672466, 27.6687896782942777, 1538.49356322666612, 170737.676816478675),
    (0.04319802351081925, 3.25987869173241171, 23.0680178041573590, 1071.27252970479606, 99219.5073582742867),
    (0.0517643852630915, 3.07971606106221469, 19.2256837560034436, 745.894825649991859, 57656.9101155517754),
    (0.062029494960450036, 2.89982550756861396, 16.0159725986920741, 519.298439067258158, 33503.2103725119909),
    (0.07433022193720348, 2.72030274146943282, 13.3338840059405452, 361.494531001017258, 19466.7686554731512),
    (0.08907023822709906, 2.54127528349023282, 11.0917963129791869, 251.598570599100551, 11309.9757156580279),
    (0.10673326583814935, 2.36291207512774196, 9.21660234024352350, 175.066375571121717, 6570.10927985253487),
    (0.12789895102145485, 2.18543548148280623, 7.64732300694678086, 121.769262336543632, 3815.94321172356425),
    (0.15326188647871078, 2.00913599902425050, 6.33312029209984298, 84.6535616629294205, 2215.71638205140050),
    (0.18365440575875366, 1.83438984391684971, 5.23164397225650260, 58.8070930104145885, 1286.05238480790882),
    (0.22007389788514795, 1.66167931900966416, 4.30765715258143365, 40.8090493067899642, 746.041223903643741),
    (0.2637155385968956, 1.49161537169187214, 3.53189421056767212, 28.2772513593109102, 432.437244418760276),
    (0.3160115123409379, 1.32496098121518236, 2.88011162311537544, 19.5528514892551938, 250.375544234571005),
    (0.3786780121616334, 1.16265287550515790, 2.33229743790647339, 13.4807561875663025, 144.730385043924968),
    (0.45377155987905265, 1.00581753041532037, 1.87200906393943337, 9.25670511111074721, 83.4699400896565197),
    (0.5437564948111628, 0.855775497927311469, 1.48581183368522720, 6.32076524191638834, 47.9828398396604421),
    (0.6515858458122182, 0.714026079989455232, 1.16279281506132032, 4.28314232932071482, 27.4564414991064430),
    (0.7807982405989791, 0.582202761410875444, 0.894126268388191627, 2.87249037195229885, 15.6097863331378542),
    (0.935634032630838, 0.461989630165860653, 0.672669960499963357, 1.89988080778481490, 8.79499446570285731),
    (1.1211744564709625, 0.354991720309869295, 0.492576656030158277, 1.23367148898851937, 4.89393090333135140),
    (1.3435083782794914, 0.262559547759225928, 0.348914045312754033, 0.781966871083218021, 2.67704800778081589),
    (1.609932113677206, 0.185581348492722140, 0.237300134564200295, 0.480376554511923713, 1.43083258336965345),
    (1.9291888703875015, 0.124275071385714125, 0.153578859300094680, 0.283491062787578747, 0.741372137893156545),
    (1.95, 0.121122625542681889, 0.149400140931589428, 0.274353539318671045, 0.712176631841683880),
    (1.999, 0.114033830589232924, 0.140049842077109683, 0.254153732617356669, 0.648611588184876904),
    (2.0, 0.113893872749533436, 0.139865881816522427, 0.253759754566055863, 0.647385390948634153),
    (2.001, 0.113754098736684612, 0.139682188301767535, 0.253366480847396790, 0.646161910135644178),
    (2.05, 0.107124918373527505, 0.130998945262150465, 0.234928767409771861, 0.589396540208046779),
    (2.3117556734278706, 0.0780316277769558605, 0.0935779836526849755, 0.158989996109996497, 0.368676252795022461),
    (2.7701871888533622, 0.0453717369641642383, 0.0529992615444639879, 0.0836357660216384943, 0.173764769894471293),
    (3.3195277292900003, 0.0240678389673617414, 0.0274776646996581946, 0.0406230040031635515, 0.0764280062132713175),
    (3.9778049620128195, 0.0114402961445205120, 0.0128046405279887811, 0.0178783395630743827, 0.0307827362202700007),
    (4.766621521549415, 0.00476916842175952017, 0.00524741993122015961, 0.00697090393086050649, 0.0110971849266960984),
    (5.711863941715511, 0.00169920965959230332, 0.00184235081449036716, 0.00234430584300630543, 0.00348406067798001646),
    (6.844552172051789, 0.000501662496869154309, 0.000537131707773929722, 0.000658614096994926727, 0.000922029992096595181),
    (8.201857557179222, 0.000118256117173258316, 0.000125268165349812713, 0.000148802408541160313, 0.000197838266697603664),
    (9.828322686024945, 0.0000212895053061542601, 0.0000223474574668600460, 0.0000258370681367146092, 0.0000328628094601163378),
    (11.77732314261915, 2.77511572700326849e-6, 2.89061916503738535e-6, 3.26599453367827031e-6, 3.99986767393138458e-6),
    (14.11281912862914, 2.45705084739272707e-7, 2.54265780628341282e-7, 2.81738392940968563e-7, 3.34118966692190581e-7),
    (16.9114544404958, 1.36866637081712518e-8, 1.40856628712911216e-8, 1.53524770089553524e-8, 1.77169240529888107e-8),
    (20.26507168314752, 4.37583722018049642e-10, 4.48253143671733162e-10, 4.81822711218813388e-10, 5.43357216088017434e-10),
    (24.283726261871283, 7.19320782771404996e-12, 7.33984970809405975e-12, 7.79771552385116308e-12, 8.62428446736650723e-12),
    (29.099298062285776, 5.32867828056925757e-14, 5.41947759225486571e-14, 5.70115995216523289e-14, 6.20316109416781895e-14),
    (34.86981934264726, 1.51890218552002084e-16, 1.54052993541124226e-16, 1.60726111392588781e-16, 1.72490268459381570e-16),
    (41.78466086660456, 1.37854143246078896e-19, 1.39494079849358649e-19, 1.44530951287895319e-19, 1.53329870140853717e-19),
    (50.07074646933357, 3.17501232245767739e-23, 3.20656234946160077e-23, 3.30309359048612584e-23, 3.47043647344808019e-23),
    (60.0, 1.41389784055910781e-27, 1.42563202651710432e-27, 1.46141890810967795e-27, 1.52305995372441619e-27),
];
